"""Training loop, dev-ROUGE checkpoint selection, evaluation and
summary-length statistics.

Defaults mirror the production setup: batch size 32 for 100 epochs,
document-model sentences truncated to 75 tokens (embedding 64, hidden
128), sentence-model sentences to 80 (embedding 400, shared hidden 1000,
task hidden 100), first-N beginning of 3 for generic documents. All of
it is overridable for desk-scale runs. After every epoch the dev set is
scored with the mean of ROUGE-1/2/L F1 and the best epoch's parameters
are kept (ties keep the earlier epoch).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from beginsum import autodiff as ad
from beginsum import checkpoint as ckpt_io
from beginsum import corpus as corpus_mod
from beginsum import rouge
from beginsum.document_model import DocumentExtractor, DocumentModelConfig
from beginsum.keywords import keywords_for_document, load_stopwords
from beginsum.sentence_model import SentenceClassifier, SentenceModelConfig


class TrainingDiverged(RuntimeError):
    pass


MODEL_KINDS = ("document", "sentence")


@dataclass
class RunConfig:
    model: str = "document"
    bidi: bool = False
    keywords: bool = False
    contextual: bool = False
    self_att: bool = False
    batch_size: int = 32
    epochs: int = 100
    n_beginning: int = 3
    generic: bool = False
    seed: int = 0
    lr: float = 1e-3
    threshold: float = 0.5
    max_sentences: int | None = None
    min_count: int = 2
    max_tokens: int | None = None
    emb_dim: int | None = None
    word_hidden: int | None = None
    doc_hidden: int | None = None
    shared_hidden: int | None = None
    task_hidden: int | None = None
    kw_hidden: int | None = None
    lm_weight: float = 0.1
    begin_reps: str = "shared"
    pretrain_epochs: int = 0
    top_keywords: int = 5
    contextual_path: str | None = None
    stopwords_path: str | None = None

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ValueError(f"model must be one of {MODEL_KINDS}, not {self.model!r}")
        if self.model == "sentence" and (self.keywords or self.contextual):
            raise ValueError("keyword and contextual augmentations apply to the "
                             "document model only")
        if self.model == "document" and self.self_att:
            raise ValueError("self-attention applies to the sentence model only")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.n_beginning < 1:
            raise ValueError("n_beginning must be >= 1")

    def resolved_max_tokens(self):
        if self.max_tokens is not None:
            return self.max_tokens
        return 75 if self.model == "document" else 80

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {unknown}")
        return cls(**d)

    @classmethod
    def from_file(cls, path):
        """key=value lines; '#' starts a comment; types follow the fields."""
        types = {f.name: f.type for f in fields(cls)}
        out = {}
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{line_no}: expected key=value")
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in types:
                    raise ValueError(f"{path}:{line_no}: unknown key {key!r}")
                out[key] = _coerce(value, types[key])
        return cls.from_dict(out)


def _coerce(value, type_hint):
    hint = str(type_hint)
    if value.lower() in ("none", ""):
        return None
    if "bool" in hint:
        if value.lower() in ("true", "1", "yes"):
            return True
        if value.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    if "int" in hint:
        return int(value)
    if "float" in hint:
        return float(value)
    return value


# ---------------------------------------------------------------------------
# preparation and model construction
# ---------------------------------------------------------------------------

def prepare(threads, config, vocab=None):
    """Assemble documents (building the vocabulary if not given)."""
    if vocab is None:
        vocab = corpus_mod.build_vocab(threads, min_count=config.min_count)
    generic_n = config.n_beginning if config.generic else None
    docs = [corpus_mod.assemble(t, vocab, config.resolved_max_tokens(), generic_n)
            for t in threads]
    return vocab, docs


def build_model(config, vocab_size):
    if config.model == "document":
        model_cfg = DocumentModelConfig(
            vocab_size=vocab_size,
            emb_dim=config.emb_dim or 64,
            word_hidden=config.word_hidden or 128,
            doc_hidden=config.doc_hidden or 128,
            kw_hidden=config.kw_hidden,
            use_bidi=config.bidi,
            use_keywords=config.keywords,
            contextual=config.contextual,
        )
        return DocumentExtractor(model_cfg, seed=config.seed)
    model_cfg = SentenceModelConfig(
        vocab_size=vocab_size,
        emb_dim=config.emb_dim or 400,
        shared_hidden=config.shared_hidden or 1000,
        task_hidden=config.task_hidden or 100,
        use_self_att=config.self_att,
        use_bidi=config.bidi,
        lm_weight=config.lm_weight,
        begin_reps=config.begin_reps,
    )
    return SentenceClassifier(model_cfg, seed=config.seed)


class Pipeline:
    """Bundles a model with the per-document extras its config needs
    (keyword id sequences, contextual vectors)."""

    def __init__(self, config, vocab, contextual_vectors=None):
        self.config = config
        self.vocab = vocab
        self.model = build_model(config, vocab.size)
        self.stopwords = None
        if config.keywords:
            self.stopwords = load_stopwords(config.stopwords_path)
        self.contextual_vectors = contextual_vectors
        if config.contextual and contextual_vectors is None:
            raise ValueError("config.contextual set but no vectors supplied")
        self._kw_cache = {}

    def _kwargs(self, doc):
        if self.config.model != "document":
            return {}
        kwargs = {}
        if self.config.keywords:
            if doc.doc_id not in self._kw_cache:
                seqs = keywords_for_document(doc, self.stopwords, self.config.top_keywords)
                self._kw_cache[doc.doc_id] = [[self.vocab.lookup(t) for t in seq]
                                              for seq in seqs]
            kwargs["keyword_ids"] = self._kw_cache[doc.doc_id]
        if self.config.contextual:
            kwargs["contextual_vectors"] = self.contextual_vectors
        return kwargs

    def loss(self, doc):
        return self.model.loss(doc, **self._kwargs(doc))

    def predict(self, doc):
        return self.model.predict(doc, **self._kwargs(doc))

    def summarize(self, doc):
        probs = self.predict(doc)
        from beginsum.selection import select
        return select(probs, doc.texts, threshold=self.config.threshold,
                      max_sentences=self.config.max_sentences)


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------

@dataclass
class TrainResult:
    checkpoint: dict
    best_epoch: int
    best_dev: float
    history: list = field(default_factory=list)


def dev_rouge(pipeline, docs):
    """Mean over documents of the mean of the three F1 values."""
    scores = []
    for doc in docs:
        ref = corpus_mod.reference_text(doc)
        if ref is None:
            continue
        summary = pipeline.summarize(doc)
        scores.append(rouge.mean_f1(rouge.score_summary(summary.text(), ref)))
    if not scores:
        raise ValueError("no dev document carries a reference summary or labels")
    return sum(scores) / len(scores)


def train(config, train_threads, dev_threads, contextual_vectors=None):
    """Full training run; returns the best checkpoint by dev ROUGE."""
    vocab, train_docs = prepare(train_threads, config)
    _, dev_docs = prepare(dev_threads, config, vocab=vocab)
    if not train_docs or not dev_docs:
        raise ValueError("train and dev splits must both be nonempty")

    pipeline = Pipeline(config, vocab, contextual_vectors)
    model = pipeline.model
    params = model.parameters()
    opt = ad.Adam(list(params.values()), lr=config.lr)
    shuffle_rng = np.random.default_rng(config.seed)

    if config.pretrain_epochs and config.model == "sentence":
        for _ in range(config.pretrain_epochs):
            order = shuffle_rng.permutation(len(train_docs))
            for start in range(0, len(order), config.batch_size):
                batch = [train_docs[i] for i in order[start:start + config.batch_size]]
                opt.zero_grad()
                total = _batch_mean([model.lm_only_loss(d) for d in batch])
                ad.backward(total)
                opt.step()

    best_epoch, best_dev, best_params = 0, -1.0, None
    history = []
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(train_docs))
        epoch_losses = []
        for step, start in enumerate(range(0, len(order), config.batch_size)):
            batch = [train_docs[i] for i in order[start:start + config.batch_size]]
            opt.zero_grad()
            total = _batch_mean([pipeline.loss(d) for d in batch])
            value = total.item()
            if not math.isfinite(value):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch} step {step}")
            ad.backward(total)
            opt.step()
            epoch_losses.append(value)

        score = dev_rouge(pipeline, dev_docs)
        history.append({"epoch": epoch,
                        "train_loss": sum(epoch_losses) / len(epoch_losses),
                        "dev_rouge": score})
        if score > best_dev:  # strict: ties keep the earlier epoch
            best_dev = score
            best_epoch = epoch
            best_params = {name: t.data.copy() for name, t in params.items()}

    for name, tensor in params.items():
        tensor.data = best_params[name]
    checkpoint = ckpt_io.checkpoint_dict(
        config.model, config.to_dict(), vocab.to_dict(), params)
    return TrainResult(checkpoint=checkpoint, best_epoch=best_epoch,
                       best_dev=best_dev, history=history)


def _batch_mean(losses):
    total = losses[0]
    for term in losses[1:]:
        total = ad.add(total, term)
    return ad.scale(total, 1.0 / len(losses))


def pipeline_from_checkpoint(ckpt, contextual_vectors=None):
    config = RunConfig.from_dict(ckpt["config"])
    vocab = corpus_mod.Vocabulary.from_dict(ckpt["vocab"])
    pipeline = Pipeline(config, vocab, contextual_vectors)
    ckpt_io.restore_params(ckpt, pipeline.model.parameters())
    return pipeline


# ---------------------------------------------------------------------------
# evaluation and length statistics
# ---------------------------------------------------------------------------

def length_stats(counts):
    """(average, population standard deviation) of sentence counts."""
    if not counts:
        return 0.0, 0.0
    counts = list(counts)
    avg = sum(counts) / len(counts)
    var = sum((c - avg) ** 2 for c in counts) / len(counts)
    return avg, math.sqrt(var)


@dataclass
class EvalReport:
    name: str
    per_doc: list
    aggregate: rouge.RougeResult
    system_avg: float
    system_std: float
    gold_avg: float | None
    gold_std: float | None
    skipped: list

    def score_tsv(self):
        return rouge.format_report_rows([(self.name, self.aggregate)])

    def lengths_tsv(self):
        lines = ["model\tavg\tstd"]
        lines.append(f"{self.name}\t{self.system_avg:.2f}\t{self.system_std:.2f}")
        if self.gold_avg is not None:
            lines.append(f"human\t{self.gold_avg:.2f}\t{self.gold_std:.2f}")
        return "\n".join(lines) + "\n"

    def per_doc_tsv(self):
        lines = ["doc_id\tR1\tR2\tRL\tselected"]
        for doc_id, res, n_sel in self.per_doc:
            lines.append(f"{doc_id}\t{res.r1.f1 * 100:.2f}\t{res.r2.f1 * 100:.2f}"
                         f"\t{res.rl.f1 * 100:.2f}\t{n_sel}")
        return "\n".join(lines) + "\n"


def evaluate_pipeline(pipeline, docs, name=None):
    per_doc, results, sys_counts, gold_counts, skipped = [], [], [], [], []
    for doc in docs:
        summary = pipeline.summarize(doc)
        sys_counts.append(len(summary.indices))
        if doc.labels is not None:
            gold_counts.append(sum(doc.labels))
        ref = corpus_mod.reference_text(doc)
        if ref is None:
            skipped.append(doc.doc_id)
            continue
        res = rouge.score_summary(summary.text(), ref)
        results.append(res)
        per_doc.append((doc.doc_id, res, len(summary.indices)))
    if not results:
        raise ValueError("no evaluated document carries a reference")
    avg, std = length_stats(sys_counts)
    gold_avg, gold_std = (length_stats(gold_counts) if gold_counts else (None, None))
    return EvalReport(
        name=name or pipeline.config.model,
        per_doc=per_doc,
        aggregate=rouge.corpus_average(results),
        system_avg=avg, system_std=std,
        gold_avg=gold_avg, gold_std=gold_std,
        skipped=skipped,
    )


def evaluate_checkpoint(ckpt, threads, name=None, contextual_vectors=None):
    pipeline = pipeline_from_checkpoint(ckpt, contextual_vectors)
    vocab = pipeline.vocab
    _, docs = prepare(threads, pipeline.config, vocab=vocab)
    return evaluate_pipeline(pipeline, docs, name=name)
