"""RAKE keyword extraction, scoped to a single sentence.

Candidate phrases are maximal runs of tokens that are neither stopwords
nor punctuation. Word score is degree/frequency where degree counts the
word's co-occurrences (including itself) inside candidate phrases of the
sentence; a phrase scores the sum of its member word scores, repeats
counted per occurrence. Identical phrases are deduplicated keeping the
first occurrence.
"""

from importlib import resources


def load_stopwords(path=None):
    """Stopword set: packaged English list, or one token per line file."""
    if path is None:
        text = resources.files("beginsum.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    words = frozenset(line.strip() for line in text.splitlines() if line.strip())
    if not words:
        raise ValueError("stopword list is empty")
    return words


def _is_delimiter(token, stopwords):
    return token in stopwords or not any(ch.isalnum() for ch in token)


def candidate_phrases(tokens, stopwords):
    phrases = []
    run = []
    for tok in tokens:
        if _is_delimiter(tok, stopwords):
            if run:
                phrases.append(run)
            run = []
        else:
            run.append(tok)
    if run:
        phrases.append(run)
    return phrases


def rake(tokens, stopwords):
    """Ranked (phrase tokens, score) pairs for one sentence, score
    descending with ties kept in first-occurrence order."""
    phrases = candidate_phrases(tokens, stopwords)
    freq = {}
    degree = {}
    for phrase in phrases:
        for word in phrase:
            freq[word] = freq.get(word, 0) + 1
            degree[word] = degree.get(word, 0) + len(phrase)
    score = {w: degree[w] / freq[w] for w in freq}

    seen = set()
    ranked = []
    for phrase in phrases:
        key = tuple(phrase)
        if key in seen:
            continue
        seen.add(key)
        ranked.append((list(phrase), sum(score[w] for w in phrase)))
    ranked.sort(key=lambda item: -item[1])  # stable: ties stay in order
    return ranked


def keywords_for_document(doc, stopwords, top_t=5):
    """Per sentence: the top_t phrases flattened into one token sequence
    in score order (empty list when the sentence has no candidates)."""
    if top_t < 1:
        raise ValueError("top_t must be >= 1")
    out = []
    for toks in doc.tokens:
        ranked = rake(toks, stopwords)
        flat = []
        for phrase, _ in ranked[:top_t]:
            flat.extend(phrase)
        out.append(flat)
    return out
