"""Auto-regressive document-level extractor.

Sentences are encoded by a word BiLSTM, then a document BiLSTM produces
per-sentence states h_i (width 2h). Optional augmentations widen the
scoring representation r_i:
  * begin-attention: r_i = G_i (width 4 x 2h), computed at sentence
    granularity against the beginning sentences' states;
  * keywords: r_i = [r_i ; keyword-encoder state] (adds 2h_kw);
  * contextual vectors replace the embedding lookup (frozen inputs).

The scoring recurrence (the reference design for this package):

    s_i      = sum_{j<i} p_j * r_j          running summary state
    content  = r_i . w_c
    salience = r_i . W_s . dtanh            dtanh = tanh(W_dp . mean(h) + b_dp)
    novelty  = r_i . W_n . tanh(s_i)
    logit_i  = content + salience - novelty + apos[min(i,9)]
               + rpos[min(4i//m, 3)] + bias
    p_i      = sigmoid(logit_i)

Earlier decisions feed later ones through s_i, which is what makes the
model auto-regressive. Positional terms are one learned scalar per
bucket. Training loss is mean binary cross-entropy against gold labels.
"""

import numpy as np

from beginsum import autodiff as ad
from beginsum import encoders
from beginsum.attention import AttentionConfig, beginning_aware
from beginsum.selection import select


class DocumentModelConfig:
    def __init__(self, vocab_size, emb_dim=64, word_hidden=128, doc_hidden=128,
                 kw_hidden=None, use_bidi=False, use_keywords=False,
                 contextual=False, abs_buckets=10, rel_buckets=4):
        self.vocab_size = vocab_size
        self.emb_dim = emb_dim
        self.word_hidden = word_hidden
        self.doc_hidden = doc_hidden
        self.kw_hidden = kw_hidden if kw_hidden is not None else word_hidden
        self.use_bidi = use_bidi
        self.use_keywords = use_keywords
        self.contextual = contextual
        self.abs_buckets = abs_buckets
        self.rel_buckets = rel_buckets

    def rep_width(self):
        w = 2 * self.doc_hidden
        if self.use_bidi:
            w *= 4
        if self.use_keywords:
            w += 2 * self.kw_hidden
        return w

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class DocumentExtractor:
    def __init__(self, config, seed=0):
        self.config = config
        rng = ad.seeded_rng(seed)
        c = config
        input_dim = encoders.CONTEXTUAL_WIDTH if c.contextual else c.emb_dim
        self.embedding = None
        if not c.contextual:
            self.embedding = encoders.make_embedding(rng, c.vocab_size, c.emb_dim)
        self.word_lstm = encoders.BiLstmParams(rng, input_dim, c.word_hidden)
        self.doc_lstm = encoders.BiLstmParams(rng, 2 * c.word_hidden, c.doc_hidden)
        self.attention = None
        if c.use_bidi:
            self.attention = AttentionConfig(rng, 2 * c.doc_hidden)
        self.kw_lstm = None
        if c.use_keywords:
            kw_in = encoders.CONTEXTUAL_WIDTH if c.contextual else c.emb_dim
            self.kw_lstm = encoders.BiLstmParams(rng, kw_in, c.kw_hidden)

        w = c.rep_width()
        dd = 2 * c.doc_hidden
        self.w_content = ad.uniform_param(rng, (w, 1), fan_in=w)
        self.w_salience = ad.uniform_param(rng, (w, dd), fan_in=w)
        self.w_novelty = ad.uniform_param(rng, (w, w), fan_in=w)
        self.w_docrep = ad.uniform_param(rng, (dd, dd), fan_in=dd)
        self.b_docrep = ad.zeros_param((1, dd))
        self.abs_pos = ad.zeros_param((c.abs_buckets, 1))
        self.rel_pos = ad.zeros_param((c.rel_buckets, 1))
        self.bias = ad.zeros_param((1, 1))

    def parameters(self):
        out = {}
        if self.embedding is not None:
            out["embedding"] = self.embedding.weights
        out.update(self.word_lstm.named("word_lstm"))
        out.update(self.doc_lstm.named("doc_lstm"))
        if self.attention is not None:
            out.update(self.attention.named("attention"))
        if self.kw_lstm is not None:
            out.update(self.kw_lstm.named("kw_lstm"))
        out.update({
            "w_content": self.w_content,
            "w_salience": self.w_salience,
            "w_novelty": self.w_novelty,
            "w_docrep": self.w_docrep,
            "b_docrep": self.b_docrep,
            "abs_pos": self.abs_pos,
            "rel_pos": self.rel_pos,
            "bias": self.bias,
        })
        return out

    # -- encoding ----------------------------------------------------------

    def _word_inputs(self, doc, contextual_vectors):
        if self.config.contextual:
            if contextual_vectors is None:
                raise ValueError("model is configured for contextual vectors "
                                 "but none were supplied")
            return encoders.contextual_for_document(contextual_vectors, doc)
        return None

    def _sentence_reps(self, doc, ctx_inputs):
        reps = []
        for i in range(doc.num_sentences):
            if ctx_inputs is not None:
                reps.append(encoders.bilstm_final(ctx_inputs[i], self.word_lstm))
            else:
                reps.append(encoders.encode_words(doc.sentences[i], doc.lengths[i],
                                                  self.embedding, self.word_lstm))
        return reps

    def _scoring_reps(self, doc, ctx_inputs, keyword_ids):
        word_reps = self._sentence_reps(doc, ctx_inputs)
        doc_states = encoders.encode_sentences(word_reps, self.doc_lstm)
        h_matrix = ad.concat(doc_states, axis=0)

        if self.config.use_bidi:
            b0, b1 = doc.beginning_range
            h_begin = ad.narrow(h_matrix, 0, b0, b1 - b0)
            fused = beginning_aware(h_matrix, h_begin, self.attention.w0)
            reps = [ad.narrow(fused, 0, i, 1) for i in range(doc.num_sentences)]
        else:
            reps = doc_states

        if self.config.use_keywords:
            if keyword_ids is None:
                raise ValueError("model is configured for keywords but no "
                                 "keyword sequences were supplied")
            if len(keyword_ids) != doc.num_sentences:
                raise ValueError(f"{len(keyword_ids)} keyword sequences for "
                                 f"{doc.num_sentences} sentences")
            reps = [ad.concat([r, encoders.encode_keywords(ids, self.embedding, self.kw_lstm)],
                              axis=1)
                    for r, ids in zip(reps, keyword_ids)]
        return reps, h_matrix

    # -- scoring -----------------------------------------------------------

    def _recurrence(self, doc, contextual_vectors, keyword_ids, logit_overrides):
        ctx_inputs = self._word_inputs(doc, contextual_vectors)
        reps, h_matrix = self._scoring_reps(doc, ctx_inputs, keyword_ids)
        m = doc.num_sentences

        mean_row = ad.tensor(np.full((1, m), 1.0 / m))
        doc_mean = ad.matmul(mean_row, h_matrix)
        dtanh = ad.tanh(ad.add(ad.matmul(doc_mean, self.w_docrep), self.b_docrep))
        sal_vec = ad.matmul(self.w_salience, ad.transpose(dtanh))  # w x 1

        w = reps[0].data.shape[1]
        state = ad.tensor(np.zeros((1, w)))
        logits, probs = [], []
        for i, rep in enumerate(reps):
            content = ad.matmul(rep, self.w_content)
            salience = ad.matmul(rep, sal_vec)
            novelty = ad.matmul(rep, ad.matmul(self.w_novelty, ad.transpose(ad.tanh(state))))
            apos = ad.narrow(self.abs_pos, 0, min(i, self.config.abs_buckets - 1), 1)
            rpos = ad.narrow(self.rel_pos, 0,
                             min(self.config.rel_buckets * i // m, self.config.rel_buckets - 1), 1)
            logit = ad.add(ad.add(ad.add(ad.add(ad.add(
                content, salience), ad.neg(novelty)), apos), rpos), self.bias)
            if logit_overrides and i in logit_overrides:
                logit = ad.tensor([[float(logit_overrides[i])]])
            p = ad.sigmoid(logit)
            state = ad.add(state, ad.mul(p, rep))
            logits.append(logit)
            probs.append(p)
        return logits, probs

    def score(self, doc, contextual_vectors=None, keyword_ids=None, logit_overrides=None):
        """Per-sentence selection probabilities (list of 1x1 tensors)."""
        _, probs = self._recurrence(doc, contextual_vectors, keyword_ids, logit_overrides)
        return probs

    def loss(self, doc, contextual_vectors=None, keyword_ids=None):
        if doc.labels is None:
            raise ValueError(f"document {doc.doc_id!r} has no labels")
        logits, _ = self._recurrence(doc, contextual_vectors, keyword_ids, None)
        targets = np.asarray(doc.labels, dtype=np.float64).reshape(-1, 1)
        return ad.bce_with_logits(ad.concat(logits, axis=0), targets)

    def predict(self, doc, contextual_vectors=None, keyword_ids=None):
        with ad.no_grad():
            probs = self.score(doc, contextual_vectors, keyword_ids)
        return np.array([p.item() for p in probs])

    def summarize(self, doc, threshold=0.5, max_sentences=None,
                  contextual_vectors=None, keyword_ids=None):
        probs = self.predict(doc, contextual_vectors, keyword_ids)
        return select(probs, doc.texts, threshold=threshold, max_sentences=max_sentences)
