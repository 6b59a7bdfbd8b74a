"""Corpus ingestion: thread documents, sentence splitting, tokenization,
vocabulary, and assembly of the flat per-thread document.

Corpus files are JSONL, one object per line:
    {"id": str, "comments": [str, ...],
     "labels": [[0|1, ...], ...] optional (one list per comment, aligned
      with that comment's split sentences),
     "summary": str optional}
Generic (non-thread) documents use a single-element "comments" list.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass

from beginsum import rouge

PAD = 0
UNK = 1

# words whose trailing period never ends a sentence
ABBREVIATIONS = frozenset({
    "dr.", "mr.", "mrs.", "ms.", "prof.", "sr.", "jr.", "st.", "mt.",
    "vs.", "etc.", "e.g.", "i.e.", "cf.", "al.", "fig.", "no.", "vol.",
    "inc.", "co.", "corp.", "dept.", "approx.", "est.", "jan.", "feb.",
    "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.",
    "nov.", "dec.", "u.s.", "u.k.", "a.m.", "p.m.",
})

_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*|[^\w\s]|_")


def tokenize(text):
    """Lowercase; split on whitespace; punctuation becomes its own token."""
    return _TOKEN_RE.findall(text.lower())


def split_sentences(text):
    """Rule-based splitting: a boundary is [.?!]+ followed by whitespace
    and an uppercase letter, or end of text, unless the word carrying the
    punctuation is on the abbreviation guard list."""
    s = text.strip()
    if not s:
        return []
    sentences = []
    start = 0
    i = 0
    n = len(s)
    while i < n:
        if s[i] not in ".?!":
            i += 1
            continue
        j = i
        while j + 1 < n and s[j + 1] in ".?!":
            j += 1
        k = i
        while k > start and not s[k - 1].isspace():
            k -= 1
        word = s[k:j + 1].lower()
        t = j + 1
        while t < n and s[t].isspace():
            t += 1
        at_end = t >= n
        boundary = (at_end or (t > j + 1 and s[t].isupper())) and word not in ABBREVIATIONS
        if boundary:
            chunk = s[start:j + 1].strip()
            if chunk:
                sentences.append(chunk)
            start = t
            i = t
        else:
            i = j + 1
    if start < n:
        tail = s[start:].strip()
        if tail:
            sentences.append(tail)
    return sentences


@dataclass
class RawThread:
    id: str
    comments: list[str]
    labels: list[list[int]] | None = None
    summary: str | None = None


@dataclass
class Vocabulary:
    token_to_id: dict[str, int]
    min_count: int = 2

    @property
    def size(self):
        return len(self.token_to_id) + 2

    def lookup(self, token):
        return self.token_to_id.get(token, UNK)

    def to_dict(self):
        ordered = sorted(self.token_to_id.items(), key=lambda kv: kv[1])
        return {"tokens": [tok for tok, _ in ordered], "min_count": self.min_count}

    @classmethod
    def from_dict(cls, d):
        return cls({tok: i + 2 for i, tok in enumerate(d["tokens"])}, d["min_count"])


def build_vocab(threads, min_count=2):
    """Ids are assigned by frequency (desc), ties lexicographic; 0/1 are
    reserved for PAD/UNK. Tokens under min_count map to UNK at lookup."""
    counts = Counter()
    for thread in threads:
        for comment in thread.comments:
            for sent in split_sentences(comment):
                counts.update(tokenize(sent))
    kept = sorted((tok for tok, c in counts.items() if c >= min_count),
                  key=lambda tok: (-counts[tok], tok))
    return Vocabulary({tok: i + 2 for i, tok in enumerate(kept)}, min_count)


@dataclass
class ThreadDocument:
    doc_id: str
    sentences: list[list[int]]          # padded to max_tokens
    lengths: list[int]                  # true token counts (post-truncation)
    tokens: list[list[str]]             # surface tokens, truncated
    texts: list[str]                    # full surface sentences
    comment_of: list[int]
    beginning_range: tuple[int, int]
    labels: list[int] | None
    summary: str | None
    max_tokens: int
    truncated: bool = False

    @property
    def num_sentences(self):
        return len(self.sentences)

    def beginning_indices(self):
        return range(self.beginning_range[0], self.beginning_range[1])

    def to_dict(self):
        return {
            "doc_id": self.doc_id,
            "sentences": self.sentences,
            "lengths": self.lengths,
            "tokens": self.tokens,
            "texts": self.texts,
            "comment_of": self.comment_of,
            "beginning_range": list(self.beginning_range),
            "labels": self.labels,
            "summary": self.summary,
            "max_tokens": self.max_tokens,
            "truncated": self.truncated,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            doc_id=d["doc_id"],
            sentences=[list(s) for s in d["sentences"]],
            lengths=list(d["lengths"]),
            tokens=[list(t) for t in d["tokens"]],
            texts=list(d["texts"]),
            comment_of=list(d["comment_of"]),
            beginning_range=tuple(d["beginning_range"]),
            labels=list(d["labels"]) if d["labels"] is not None else None,
            summary=d["summary"],
            max_tokens=d["max_tokens"],
            truncated=d["truncated"],
        )


def beginning_generic(num_sentences, n_first):
    """First-N beginning for generic documents: [0, min(N, m))."""
    if n_first < 1:
        raise ValueError("n_first must be >= 1")
    return (0, min(n_first, num_sentences))


def oracle_labels(texts, summary):
    """Greedy labels: add the sentence with the best marginal ROUGE-1 F1
    gain against the reference until no sentence gains."""
    ref = rouge.normalize_tokens(summary)
    sent_tokens = [rouge.normalize_tokens(t) for t in texts]
    chosen = []
    best_f1 = 0.0
    while True:
        best_gain, best_idx = 0.0, None
        for i in range(len(texts)):
            if i in chosen:
                continue
            cand = [tok for j in sorted(chosen + [i]) for tok in sent_tokens[j]]
            f1 = rouge.rouge_n(cand, ref, 1).f1
            gain = f1 - best_f1
            if gain > best_gain:
                best_gain, best_idx = gain, i
        if best_idx is None:
            break
        chosen.append(best_idx)
        best_f1 += best_gain
    labels = [0] * len(texts)
    for i in chosen:
        labels[i] = 1
    return labels


def assemble(thread, vocab, max_tokens, generic_n=None):
    """Flatten comments in order into one document. Sentences longer than
    max_tokens lose tokens (never sentences); shorter ones get PAD. The
    beginning is comment 0, or the first generic_n sentences when set."""
    if not thread.comments or not any(c.strip() for c in thread.comments):
        raise ValueError(f"thread {thread.id!r} has no comments")

    texts, tokens, comment_of = [], [], []
    per_comment_counts = []
    for j, comment in enumerate(thread.comments):
        sents = split_sentences(comment)
        per_comment_counts.append(len(sents))
        for sent in sents:
            texts.append(sent)
            tokens.append(tokenize(sent))
            comment_of.append(j)
    if not texts:
        raise ValueError(f"thread {thread.id!r} has no sentences")

    truncated = False
    ids, lengths, surface = [], [], []
    for toks in tokens:
        if len(toks) > max_tokens:
            toks = toks[:max_tokens]
            truncated = True
        surface.append(toks)
        lengths.append(len(toks))
        row = [vocab.lookup(t) for t in toks] + [PAD] * (max_tokens - len(toks))
        ids.append(row)

    labels = None
    if thread.labels is not None:
        if len(thread.labels) != len(thread.comments):
            raise ValueError(
                f"thread {thread.id!r}: {len(thread.labels)} label lists for "
                f"{len(thread.comments)} comments")
        labels = []
        for j, lab in enumerate(thread.labels):
            if len(lab) != per_comment_counts[j]:
                raise ValueError(
                    f"thread {thread.id!r} comment {j}: {len(lab)} labels for "
                    f"{per_comment_counts[j]} sentences")
            labels.extend(int(v) for v in lab)
    elif thread.summary is not None:
        labels = oracle_labels(texts, thread.summary)

    if generic_n is not None:
        beginning = beginning_generic(len(texts), generic_n)
    else:
        # comment 0 is the initial post; fall back to the first sentence
        # if it happened to be empty so the range stays nonempty
        beginning = (0, max(per_comment_counts[0], 1))

    return ThreadDocument(
        doc_id=thread.id,
        sentences=ids,
        lengths=lengths,
        tokens=surface,
        texts=texts,
        comment_of=comment_of,
        beginning_range=beginning,
        labels=labels,
        summary=thread.summary,
        max_tokens=max_tokens,
        truncated=truncated,
    )


def reference_text(doc):
    """Reference for scoring: the thread summary if present, otherwise the
    concatenated gold-labeled sentences (None if neither exists)."""
    if doc.summary is not None:
        return doc.summary
    if doc.labels is not None:
        return " ".join(t for t, lab in zip(doc.texts, doc.labels) if lab)
    return None


# ---------------------------------------------------------------------------
# JSONL I/O
# ---------------------------------------------------------------------------

def thread_to_json(thread):
    obj = {"id": thread.id, "comments": thread.comments}
    if thread.labels is not None:
        obj["labels"] = thread.labels
    if thread.summary is not None:
        obj["summary"] = thread.summary
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def read_jsonl(path):
    threads = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: bad JSON ({exc})") from None
            threads.append(RawThread(
                id=str(obj["id"]),
                comments=list(obj["comments"]),
                labels=obj.get("labels"),
                summary=obj.get("summary"),
            ))
    return threads


def write_jsonl(threads, path):
    with open(path, "w", encoding="utf-8") as f:
        for thread in threads:
            f.write(thread_to_json(thread) + "\n")
