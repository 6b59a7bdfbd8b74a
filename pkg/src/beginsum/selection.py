"""Turning per-sentence probabilities into a summary."""

from dataclasses import dataclass


@dataclass
class Summary:
    indices: list
    texts: list

    def text(self):
        return " ".join(self.texts)


def select(probs, texts, threshold=0.5, max_sentences=None):
    """Sentences with p strictly above threshold, in document order. With
    max_sentences set, keep the top-k by probability (ties favor earlier
    sentences) and restore document order. May be empty."""
    picked = [i for i, p in enumerate(probs) if p > threshold]
    if max_sentences is not None and len(picked) > max_sentences:
        ranked = sorted(picked, key=lambda i: (-probs[i], i))
        picked = sorted(ranked[:max_sentences])
    return Summary(indices=picked, texts=[texts[i] for i in picked])
