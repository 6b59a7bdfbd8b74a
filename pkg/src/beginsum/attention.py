"""Beginning-aware bidirectional attention.

Given document-side representations h_d (m x d) and beginning-side
representations h_b (n x d), the block computes

    S[i, j]  = w0 . [h_d_i ; h_b_j ; h_d_i * h_b_j]
    S_row    = softmax over each row of S
    S_col    = softmax over each column of S
    A        = S_row . h_b                     (document-to-beginning)
    B        = S_row . S_col^T . h_d           (beginning-to-document)
    G        = [h_d ; A ; h_d * A ; h_d * B]   (m x 4d)

S_row.S_col^T is m x m, so it must weight the m document rows; that is
what forces h_d (not h_b) in the B product. The same code path serves
both granularities: sentence-level rows for the document extractor,
word-level rows for the per-sentence classifier.
"""

import numpy as np

from beginsum import autodiff as ad


class AttentionConfig:
    """Trainable weights of the block for representations of width d."""

    def __init__(self, rng, d, granularity="sentence-level"):
        self.d = d
        self.granularity = granularity
        self.w0 = ad.uniform_param(rng, (1, 3 * d), fan_in=3 * d)

    def named(self, prefix):
        return {f"{prefix}.w0": self.w0}


def similarity(h_d, h_b, w0):
    """m x n similarity matrix; computed in the decomposed form
    w1.h_d_i + w2.h_b_j + (h_d_i*w3).h_b_j which is the same bilinear map
    without materializing per-pair concatenations."""
    m_, d = h_d.data.shape
    n_, db = h_b.data.shape
    if d != db:
        raise ad.ShapeError(f"similarity widths differ: {d} vs {db}")
    if w0.data.shape != (1, 3 * d):
        raise ad.ShapeError(f"w0 shape {w0.data.shape} != (1, {3 * d})")
    w1 = ad.narrow(w0, 1, 0, d)
    w2 = ad.narrow(w0, 1, d, d)
    w3 = ad.narrow(w0, 1, 2 * d, d)
    part_d = ad.matmul(h_d, ad.transpose(w1))            # m x 1
    part_b = ad.transpose(ad.matmul(h_b, ad.transpose(w2)))  # 1 x n
    part_x = ad.matmul(ad.mul(h_d, w3), ad.transpose(h_b))   # m x n
    return ad.add(ad.add(part_d, part_b), part_x)


def normalize(s, doc_mask=None, begin_mask=None):
    """(row-stochastic, column-stochastic) softmax normalizations of S.

    This is the single place that fixes which direction gets rows: S_row
    normalizes each row over the beginning axis, S_col each column over
    the document axis. begin_mask (length n) hides padded beginning
    entries from the row softmax; doc_mask (length m) hides padded
    document entries from the column softmax.
    """
    m_, n_ = s.data.shape
    row_mask = None
    if begin_mask is not None:
        row_mask = np.broadcast_to(np.asarray(begin_mask, dtype=bool)[None, :], (m_, n_))
    col_mask = None
    if doc_mask is not None:
        col_mask = np.broadcast_to(np.asarray(doc_mask, dtype=bool)[:, None], (m_, n_))
    s_row = ad.softmax_masked(s, mask=row_mask, axis=1)
    s_col = ad.softmax_masked(s, mask=col_mask, axis=0)
    return s_row, s_col


def attend(s_row, s_col, h_d, h_b):
    """A = S_row.h_b and B = S_row.S_col^T.h_d.

    The products reduce over the beginning axis in value-sorted order so
    permuting the beginning (with matched h_b rows) reproduces A and B
    bit-for-bit."""
    a = ad.matmul_sorted(s_row, h_b)
    b = ad.matmul_sorted(ad.matmul_sorted(s_row, ad.transpose(s_col)), h_d)
    return a, b


def fuse(h_d, a, b):
    """G rows: [h_d_i ; A_i ; h_d_i * A_i ; h_d_i * B_i]."""
    return ad.concat([h_d, a, ad.mul(h_d, a), ad.mul(h_d, b)], axis=1)


def beginning_aware(h_d, h_b, w0, doc_mask=None, begin_mask=None):
    """The full block: similarity, both normalizations, attention, fusion."""
    s = similarity(h_d, h_b, w0)
    s_row, s_col = normalize(s, doc_mask=doc_mask, begin_mask=begin_mask)
    a, b = attend(s_row, s_col, h_d, h_b)
    return fuse(h_d, a, b)
