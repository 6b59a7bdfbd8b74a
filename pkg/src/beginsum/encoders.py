"""Word embeddings and the LSTM encoders used at word, sentence and
keyword level.

Gate layout inside the fused 4h weight matrices is [input | forget |
output | candidate], so one sigmoid covers the first three gates. A
sentence representation is the concatenation of the final forward and
final backward hidden states (width 2h). Padded positions never enter a
recurrence: callers pass true lengths and the loops run over real
tokens only.
"""

import numpy as np

from beginsum import autodiff as ad
from beginsum.corpus import PAD

CONTEXTUAL_WIDTH = 1536  # two concatenated 768-wide layers


class EmbeddingTable:
    """Lookup table; PAD row stays zero. Frozen tables take no gradient."""

    def __init__(self, weights, frozen=False, source="random"):
        self.weights = weights
        self.frozen = frozen
        self.source = source

    @property
    def dim(self):
        return self.weights.data.shape[1]

    def lookup(self, ids):
        return ad.gather_rows(self.weights, ids)


def make_embedding(rng, vocab_size, dim, frozen=False, source="random"):
    bound = 1.0 / np.sqrt(dim)
    rows = rng.uniform(-bound, bound, size=(vocab_size, dim))
    rows[PAD] = 0.0
    return EmbeddingTable(ad.Tensor(rows, requires_grad=not frozen),
                          frozen=frozen, source=source)


class LstmParams:
    def __init__(self, rng, input_dim, hidden):
        self.input_dim = input_dim
        self.hidden = hidden
        self.wx = ad.uniform_param(rng, (input_dim, 4 * hidden), fan_in=input_dim)
        self.wh = ad.uniform_param(rng, (hidden, 4 * hidden), fan_in=hidden)
        self.b = ad.zeros_param((1, 4 * hidden))

    def named(self, prefix):
        return {f"{prefix}.wx": self.wx, f"{prefix}.wh": self.wh, f"{prefix}.b": self.b}


class BiLstmParams:
    def __init__(self, rng, input_dim, hidden):
        self.input_dim = input_dim
        self.hidden = hidden
        self.fwd = LstmParams(rng, input_dim, hidden)
        self.bwd = LstmParams(rng, input_dim, hidden)

    def named(self, prefix):
        return {**self.fwd.named(f"{prefix}.fwd"), **self.bwd.named(f"{prefix}.bwd")}


def lstm_states(xs, params):
    """All hidden states of a unidirectional LSTM over rows of xs."""
    steps = xs.data.shape[0]
    h = ad.tensor(np.zeros((1, params.hidden)))
    c = ad.tensor(np.zeros((1, params.hidden)))
    xproj = ad.matmul(xs, params.wx)  # one shot for every step
    states = []
    hid = params.hidden
    for t in range(steps):
        gates = ad.add(ad.add(ad.narrow(xproj, 0, t, 1), ad.matmul(h, params.wh)), params.b)
        ifo = ad.sigmoid(ad.narrow(gates, 1, 0, 3 * hid))
        i = ad.narrow(ifo, 1, 0, hid)
        f = ad.narrow(ifo, 1, hid, hid)
        o = ad.narrow(ifo, 1, 2 * hid, hid)
        g = ad.tanh(ad.narrow(gates, 1, 3 * hid, hid))
        c = ad.add(ad.mul(f, c), ad.mul(i, g))
        h = ad.mul(o, ad.tanh(c))
        states.append(h)
    return states


def bilstm_states(xs, params):
    """Per-position [forward_t ; backward_t] states (list of 1 x 2h)."""
    steps = xs.data.shape[0]
    fwd = lstm_states(xs, params.fwd)
    rev = ad.gather_rows(xs, list(range(steps - 1, -1, -1)))
    bwd = lstm_states(rev, params.bwd)
    return [ad.concat([fwd[t], bwd[steps - 1 - t]], axis=1) for t in range(steps)]


def bilstm_final(xs, params):
    """[final forward ; final backward] (1 x 2h)."""
    steps = xs.data.shape[0]
    fwd = lstm_states(xs, params.fwd)
    rev = ad.gather_rows(xs, list(range(steps - 1, -1, -1)))
    bwd = lstm_states(rev, params.bwd)
    return ad.concat([fwd[-1], bwd[-1]], axis=1)


def encode_words(ids, length, table, params):
    """Sentence representation from a padded id row and its true length."""
    if length < 1:
        raise ValueError("encode_words needs at least one real token")
    real = list(ids[:length])
    vocab_rows = table.weights.data.shape[0]
    for tok in real:
        if not 0 <= tok < vocab_rows:
            raise ValueError(f"token id {tok} outside vocabulary of {vocab_rows}")
    return bilstm_final(table.lookup(real), params)


def encode_sentences(reps, params):
    """Document-level states h_i, one 1 x 2h tensor per sentence."""
    if not reps:
        raise ValueError("encode_sentences needs at least one sentence")
    stacked = ad.concat(list(reps), axis=0)
    return bilstm_states(stacked, params)


def encode_keywords(ids, table, params):
    """Last BiLSTM state over the keyword tokens; zero vector if empty."""
    if len(ids) == 0:
        return ad.tensor(np.zeros((1, 2 * params.hidden)))
    return bilstm_final(table.lookup(list(ids)), params)


# ---------------------------------------------------------------------------
# precomputed contextual vectors
# ---------------------------------------------------------------------------
# File format, one token per line:
#   doc_id TAB sentence_idx TAB token_idx TAB 1536 space-separated floats

def load_contextual(path):
    """Parse a contextual-vector file into {doc_id: [sentence arrays]}."""
    per_doc = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{line_no}: expected 4 tab-separated fields")
            doc_id, sent_idx, tok_idx, blob = parts
            values = blob.split()
            if len(values) != CONTEXTUAL_WIDTH:
                raise ValueError(
                    f"{path}:{line_no}: vector width {len(values)} != {CONTEXTUAL_WIDTH}")
            vec = np.array([float(v) for v in values])
            per_doc.setdefault(doc_id, {}).setdefault(int(sent_idx), {})[int(tok_idx)] = vec

    out = {}
    for doc_id, sents in per_doc.items():
        arrays = []
        for s in range(len(sents)):
            if s not in sents:
                raise ValueError(f"{path}: doc {doc_id!r} missing sentence {s}")
            toks = sents[s]
            rows = []
            for t in range(len(toks)):
                if t not in toks:
                    raise ValueError(
                        f"{path}: doc {doc_id!r} sentence {s} missing token {t}")
                rows.append(toks[t])
            arrays.append(np.stack(rows))
        out[doc_id] = arrays
    return out


def contextual_for_document(vectors, doc):
    """Frozen per-sentence input tensors for one document; validates the
    alignment with the tokenized document."""
    if doc.doc_id not in vectors:
        raise ValueError(f"no contextual vectors for document {doc.doc_id!r}")
    arrays = vectors[doc.doc_id]
    if len(arrays) != doc.num_sentences:
        raise ValueError(
            f"document {doc.doc_id!r}: {len(arrays)} sentence vectors for "
            f"{doc.num_sentences} sentences")
    out = []
    for idx, (arr, length) in enumerate(zip(arrays, doc.lengths)):
        if arr.shape[0] != length:
            raise ValueError(
                f"document {doc.doc_id!r} sentence {idx}: {arr.shape[0]} token "
                f"vectors for {length} tokens")
        if arr.shape[1] != CONTEXTUAL_WIDTH:
            raise ValueError(
                f"document {doc.doc_id!r} sentence {idx}: width {arr.shape[1]} "
                f"!= {CONTEXTUAL_WIDTH}")
        out.append(ad.tensor(arr))
    return out


def write_contextual(path, per_doc):
    """Inverse of load_contextual, mainly for fixtures and tooling."""
    with open(path, "w", encoding="utf-8") as f:
        for doc_id, arrays in per_doc.items():
            for s, arr in enumerate(arrays):
                for t in range(arr.shape[0]):
                    blob = " ".join(repr(float(v)) for v in arr[t])
                    f.write(f"{doc_id}\t{s}\t{t}\t{blob}\n")
