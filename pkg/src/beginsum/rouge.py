"""ROUGE-1/2/L scoring on F1.

Normalization: lowercase, punctuation tokens stripped, no stemming, so
absolute numbers are comparable only under the same settings. Averaging
over a corpus is unweighted (macro) per field. Multiple references are
handled by taking, per variant, the reference with the best F1.
"""

import re
from collections import Counter
from dataclasses import dataclass

_WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class RougeResult:
    r1: RougeScore
    r2: RougeScore
    rl: RougeScore


ZERO = RougeScore(0.0, 0.0, 0.0)


def normalize_tokens(text):
    """Lowercased word tokens; punctuation-only tokens are dropped."""
    return _WORD_RE.findall(text.lower())


def _prf(overlap, cand_total, ref_total):
    p = overlap / cand_total if cand_total > 0 else 0.0
    r = overlap / ref_total if ref_total > 0 else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return RougeScore(p, r, f1)


def rouge_n(cand_tokens, ref_tokens, n):
    """Clipped n-gram overlap. Empty candidate or reference scores zero."""
    cgrams = Counter(tuple(cand_tokens[i:i + n]) for i in range(len(cand_tokens) - n + 1))
    rgrams = Counter(tuple(ref_tokens[i:i + n]) for i in range(len(ref_tokens) - n + 1))
    if not cgrams or not rgrams:
        return ZERO
    overlap = sum(min(c, rgrams[g]) for g, c in cgrams.items())
    return _prf(overlap, sum(cgrams.values()), sum(rgrams.values()))


def _lcs_length(a, b):
    # rolling single-row DP
    if not a or not b:
        return 0
    row = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        prev = 0
        for j in range(1, len(b) + 1):
            cur = row[j]
            if a[i - 1] == b[j - 1]:
                row[j] = prev + 1
            elif row[j - 1] > row[j]:
                row[j] = row[j - 1]
            prev = cur
    return row[len(b)]


def rouge_l(cand_tokens, ref_tokens):
    if not cand_tokens or not ref_tokens:
        return ZERO
    lcs = _lcs_length(list(cand_tokens), list(ref_tokens))
    return _prf(lcs, len(cand_tokens), len(ref_tokens))


def score_pair(cand_tokens, ref_tokens):
    return RougeResult(
        r1=rouge_n(cand_tokens, ref_tokens, 1),
        r2=rouge_n(cand_tokens, ref_tokens, 2),
        rl=rouge_l(cand_tokens, ref_tokens),
    )


def score_summary(candidate_text, reference_texts):
    """Score candidate text against one or more references (max F1 per
    variant across references)."""
    if isinstance(reference_texts, str):
        reference_texts = [reference_texts]
    cand = normalize_tokens(candidate_text)
    best = None
    for ref_text in reference_texts:
        res = score_pair(cand, normalize_tokens(ref_text))
        if best is None:
            best = res
        else:
            best = RougeResult(
                r1=max(best.r1, res.r1, key=lambda s: s.f1),
                r2=max(best.r2, res.r2, key=lambda s: s.f1),
                rl=max(best.rl, res.rl, key=lambda s: s.f1),
            )
    return best if best is not None else RougeResult(ZERO, ZERO, ZERO)


def _mean_score(scores):
    n = len(scores)
    return RougeScore(
        sum(s.precision for s in scores) / n,
        sum(s.recall for s in scores) / n,
        sum(s.f1 for s in scores) / n,
    )


def corpus_average(results):
    """Unweighted mean of per-document precision, recall and F1."""
    results = list(results)
    if not results:
        raise ValueError("corpus_average needs at least one document")
    return RougeResult(
        r1=_mean_score([r.r1 for r in results]),
        r2=_mean_score([r.r2 for r in results]),
        rl=_mean_score([r.rl for r in results]),
    )


def mean_f1(result):
    """Single selection metric: mean of the three F1 values."""
    return (result.r1.f1 + result.r2.f1 + result.rl.f1) / 3.0


def format_report_rows(rows):
    """TSV lines: model, R1, R2, RL as F1 x 100 with 2 decimals."""
    lines = ["model\tR1\tR2\tRL"]
    for name, res in rows:
        lines.append(f"{name}\t{res.r1.f1 * 100:.2f}\t{res.r2.f1 * 100:.2f}\t{res.rl.f1 * 100:.2f}")
    return "\n".join(lines) + "\n"
