"""Non-auto-regressive per-sentence classifier.

Each sentence is decided independently: a shared word-level BiLSTM
produces per-word states, optionally fused with word-level
begin-attention (against the words of the beginning part), optionally
pooled by self-attention into a single vector, then a task BiLSTM,
a linear layer and a sigmoid give the selection probability.

A language-modeling auxiliary loss (mean next-token cross-entropy from
the shared forward states) is added with weight lm_weight; sentences of
one token contribute zero. lm_weight = 0 skips the term entirely so the
total is bit-equal to the pure classification loss.

Beginning word representations come from the shared BiLSTM by default;
begin_reps="embedding" switches to raw embeddings, which requires
emb_dim == 2 * shared_hidden so the attention widths line up.
"""

import numpy as np

from beginsum import autodiff as ad
from beginsum import encoders
from beginsum.attention import AttentionConfig, beginning_aware
from beginsum.selection import select


class SentenceModelConfig:
    def __init__(self, vocab_size, emb_dim=400, shared_hidden=1000, task_hidden=100,
                 use_self_att=False, use_bidi=False, lm_weight=0.1,
                 begin_reps="shared"):
        if begin_reps not in ("shared", "embedding"):
            raise ValueError(f"begin_reps must be 'shared' or 'embedding', not {begin_reps!r}")
        if begin_reps == "embedding" and emb_dim != 2 * shared_hidden:
            raise ValueError("begin_reps='embedding' needs emb_dim == 2*shared_hidden "
                             f"({emb_dim} != {2 * shared_hidden})")
        if lm_weight < 0:
            raise ValueError("lm_weight must be >= 0")
        self.vocab_size = vocab_size
        self.emb_dim = emb_dim
        self.shared_hidden = shared_hidden
        self.task_hidden = task_hidden
        self.use_self_att = use_self_att
        self.use_bidi = use_bidi
        self.lm_weight = lm_weight
        self.begin_reps = begin_reps

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class SentenceClassifier:
    def __init__(self, config, seed=0):
        self.config = config
        rng = ad.seeded_rng(seed)
        c = config
        self.embedding = encoders.make_embedding(rng, c.vocab_size, c.emb_dim)
        self.shared_lstm = encoders.BiLstmParams(rng, c.emb_dim, c.shared_hidden)
        word_width = 2 * c.shared_hidden
        self.attention = AttentionConfig(rng, word_width, "word-level") if c.use_bidi else None
        task_in = 4 * word_width if c.use_bidi else word_width
        self.task_lstm = encoders.BiLstmParams(rng, task_in, c.task_hidden)
        self.self_att = ad.uniform_param(rng, (1, task_in), fan_in=task_in) if c.use_self_att else None
        self.w_cls = ad.uniform_param(rng, (2 * c.task_hidden, 1), fan_in=2 * c.task_hidden)
        self.b_cls = ad.zeros_param((1, 1))
        self.w_lm = ad.uniform_param(rng, (c.shared_hidden, c.vocab_size), fan_in=c.shared_hidden)
        self.b_lm = ad.zeros_param((1, c.vocab_size))

    def parameters(self):
        out = {"embedding": self.embedding.weights}
        out.update(self.shared_lstm.named("shared_lstm"))
        out.update(self.task_lstm.named("task_lstm"))
        if self.attention is not None:
            out.update(self.attention.named("attention"))
        if self.self_att is not None:
            out["self_att"] = self.self_att
        out.update({"w_cls": self.w_cls, "b_cls": self.b_cls,
                    "w_lm": self.w_lm, "b_lm": self.b_lm})
        return out

    # -- per-document shared pieces -----------------------------------------

    def begin_word_states(self, doc):
        """Representations of every word of the beginning part (n x width)."""
        b0, b1 = doc.beginning_range
        rows = []
        for i in range(b0, b1):
            real = list(doc.sentences[i][:doc.lengths[i]])
            if not real:
                continue
            xs = self.embedding.lookup(real)
            if self.config.begin_reps == "embedding":
                rows.append(xs)
            else:
                states = encoders.bilstm_states(xs, self.shared_lstm)
                rows.append(ad.concat(states, axis=0))
        if not rows:
            raise ValueError(f"document {doc.doc_id!r} has an empty beginning part")
        return rows[0] if len(rows) == 1 else ad.concat(rows, axis=0)

    # -- one sentence ---------------------------------------------------------

    def _shared_pass(self, ids, length):
        if length < 1:
            raise ValueError("empty sentence after tokenization")
        real = list(ids[:length])
        xs = self.embedding.lookup(real)
        fwd = encoders.lstm_states(xs, self.shared_lstm.fwd)
        rev = ad.gather_rows(xs, list(range(length - 1, -1, -1)))
        bwd = encoders.lstm_states(rev, self.shared_lstm.bwd)
        per_word = [ad.concat([fwd[t], bwd[length - 1 - t]], axis=1) for t in range(length)]
        return real, fwd, per_word

    def classify_logit(self, ids, length, begin_states=None):
        real, fwd, per_word = self._shared_pass(ids, length)
        inputs = ad.concat(per_word, axis=0) if len(per_word) > 1 else per_word[0]

        if self.config.use_bidi:
            if begin_states is None:
                raise ValueError("model is configured for begin-attention but no "
                                 "beginning states were supplied")
            inputs = beginning_aware(inputs, begin_states, self.attention.w0)

        if self.config.use_self_att:
            scores = ad.matmul(inputs, ad.transpose(self.self_att))
            att = ad.softmax_masked(scores, axis=0)
            seq = ad.matmul(ad.transpose(att), inputs)
        else:
            seq = inputs

        final = encoders.bilstm_final(seq, self.task_lstm)
        logit = ad.add(ad.matmul(final, self.w_cls), self.b_cls)
        return logit, real, fwd

    def classify(self, ids, length, begin_states=None):
        """Selection probability for a single sentence."""
        logit, _, _ = self.classify_logit(ids, length, begin_states)
        return ad.sigmoid(logit)

    def lm_loss_from_states(self, real, fwd):
        """Mean next-token cross-entropy; zero for one-token sentences."""
        if len(real) < 2:
            return ad.tensor(0.0)
        states = ad.concat(fwd[:-1], axis=0) if len(fwd) > 2 else fwd[0]
        logits = ad.add(ad.matmul(states, self.w_lm), self.b_lm)
        return ad.cross_entropy_logits(logits, real[1:])

    def lm_loss(self, ids, length):
        real, fwd, _ = self._shared_pass(ids, length)
        return self.lm_loss_from_states(real, fwd)

    # -- documents ------------------------------------------------------------

    def loss(self, doc):
        """Mean over sentences of classification CE (+ lm_weight * LM CE)."""
        if doc.labels is None:
            raise ValueError(f"document {doc.doc_id!r} has no labels")
        begin = self.begin_word_states(doc) if self.config.use_bidi else None
        logits = []
        lm_terms = []
        for i in range(doc.num_sentences):
            logit, real, fwd = self.classify_logit(doc.sentences[i], doc.lengths[i], begin)
            logits.append(logit)
            if self.config.lm_weight:
                lm_terms.append(self.lm_loss_from_states(real, fwd))
        targets = np.asarray(doc.labels, dtype=np.float64).reshape(-1, 1)
        cls = ad.bce_with_logits(ad.concat(logits, axis=0), targets)
        if not self.config.lm_weight:
            return cls
        lm_sum = lm_terms[0]
        for term in lm_terms[1:]:
            lm_sum = ad.add(lm_sum, term)
        return ad.add(cls, ad.scale(lm_sum, self.config.lm_weight / doc.num_sentences))

    def lm_only_loss(self, doc):
        """Pretraining objective: mean LM loss over the document."""
        terms = [self.lm_loss(doc.sentences[i], doc.lengths[i])
                 for i in range(doc.num_sentences)]
        total = terms[0]
        for term in terms[1:]:
            total = ad.add(total, term)
        return ad.scale(total, 1.0 / doc.num_sentences)

    def predict(self, doc):
        with ad.no_grad():
            begin = self.begin_word_states(doc) if self.config.use_bidi else None
            return np.array([self.classify(doc.sentences[i], doc.lengths[i], begin).item()
                             for i in range(doc.num_sentences)])

    def summarize(self, doc, threshold=0.5, max_sentences=None):
        probs = self.predict(doc)
        return select(probs, doc.texts, threshold=threshold, max_sentences=max_sentences)
