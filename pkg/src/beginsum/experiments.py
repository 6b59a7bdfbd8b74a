"""Comparative experiment matrix.

Runs each configuration over several seeds, reports mean and std of the
test ROUGE F1 scores, pairs every begin-attention variant with its plain
counterpart (the directional H1/H4 check: the variant's mean R1 must be
within 0.5 points below the counterpart and strictly better on most
seeds), and compares the per-sentence model against the auto-regressive
one (H2). Report layout: non-neural baselines first, then the model
groups in the order given.
"""

from dataclasses import dataclass, field, replace

from beginsum import baselines as baselines_mod
from beginsum import corpus as corpus_mod
from beginsum import rouge
from beginsum.training import RunConfig, evaluate_checkpoint, prepare, train

# H1/H4 margin on the x100 ROUGE scale
H1_MARGIN_POINTS = 0.5


@dataclass
class MatrixEntry:
    name: str
    config: RunConfig
    counterpart: str | None = None


@dataclass
class MatrixRow:
    name: str
    mean: tuple        # (r1, r2, rl) means of F1
    std: tuple
    per_seed: list = field(default_factory=list)
    delta: tuple | None = None  # vs counterpart, same order


@dataclass
class PairFlag:
    name: str
    passed: bool
    wins: int
    n_seeds: int
    delta_r1: float


@dataclass
class MatrixReport:
    rows: list
    pair_flags: list
    h2: dict | None
    seeds: list

    def to_tsv(self):
        lines = ["model\tR1\tR2\tRL\tdR1\tdR2\tdRL"]
        for row in self.rows:
            cells = [row.name]
            for m, s in zip(row.mean, row.std):
                cells.append(f"{m * 100:.2f}±{s * 100:.2f}")
            if row.delta is not None:
                cells.extend(f"{d * 100:+.2f}" for d in row.delta)
            lines.append("\t".join(cells))
        lines.append("")
        lines.append("flag\tresult\tdetail")
        for flag in self.pair_flags:
            lines.append(f"begin-attention {flag.name}\t"
                         f"{'pass' if flag.passed else 'fail'}\t"
                         f"wins={flag.wins}/{flag.n_seeds} dR1={flag.delta_r1 * 100:+.2f}")
        if self.h2 is not None:
            lines.append(f"sentence-vs-document\t"
                         f"{'pass' if self.h2['passed'] else 'fail'}\t"
                         f"dR1={self.h2['delta_r1'] * 100:+.2f}")
        return "\n".join(lines) + "\n"


def default_entries(base_config):
    """The standard four-config comparison: both extractors with and
    without begin-attention."""
    doc = replace(base_config, model="document", bidi=False, self_att=False)
    sent = replace(base_config, model="sentence", bidi=False)
    return [
        MatrixEntry("document", doc),
        MatrixEntry("document+bidi", replace(doc, bidi=True), counterpart="document"),
        MatrixEntry("sentence", sent),
        MatrixEntry("sentence+bidi", replace(sent, bidi=True), counterpart="sentence"),
    ]


def _baseline_rows(train_threads, test_threads, config, lsa_dims, seed):
    _, train_docs = prepare(train_threads, config)
    vocab, test_docs = prepare(test_threads, config)
    sentences = [toks for doc in train_docs for toks in doc.tokens]
    space = baselines_mod.fit_lsa(sentences, dims=lsa_dims)

    def scored(summarize):
        results = []
        for doc in test_docs:
            ref = corpus_mod.reference_text(doc)
            if ref is None:
                continue
            results.append(rouge.score_summary(summarize(doc).text(), ref))
        return rouge.corpus_average(results)

    rows = []
    agg = scored(lambda doc: baselines_mod.kmeans_extract(doc, space, seed=seed))
    rows.append(MatrixRow("lsa+kmeans", (agg.r1.f1, agg.r2.f1, agg.rl.f1), (0.0,) * 3))
    agg = scored(lambda doc: baselines_mod.lead_summary(doc, n=3))
    rows.append(MatrixRow("lead3", (agg.r1.f1, agg.r2.f1, agg.rl.f1), (0.0,) * 3))
    return rows


def _mean_std(values):
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, var ** 0.5


def run_matrix(train_threads, dev_threads, test_threads, entries, seeds,
               include_baselines=True, lsa_dims=200, progress=None):
    seeds = list(seeds)
    if len(seeds) < 1:
        raise ValueError("run_matrix needs at least one seed")
    if len(entries) < 2:
        raise ValueError("run_matrix needs at least two configurations")

    rows = []
    if include_baselines:
        rows.extend(_baseline_rows(train_threads, test_threads,
                                   entries[0].config, lsa_dims, seeds[0]))

    per_entry = {}
    for entry in entries:
        per_seed = []
        for seed in seeds:
            config = replace(entry.config, seed=seed)
            result = train(config, train_threads, dev_threads)
            report = evaluate_checkpoint(result.checkpoint, test_threads,
                                         name=entry.name)
            agg = report.aggregate
            per_seed.append((agg.r1.f1, agg.r2.f1, agg.rl.f1))
            if progress is not None:
                progress(entry.name, seed, per_seed[-1])
        per_entry[entry.name] = per_seed

    by_name = {}
    for entry in entries:
        per_seed = per_entry[entry.name]
        mean, std = zip(*(_mean_std([s[k] for s in per_seed]) for k in range(3)))
        row = MatrixRow(entry.name, tuple(mean), tuple(std), per_seed=per_seed)
        rows.append(row)
        by_name[entry.name] = row

    pair_flags = []
    for entry in entries:
        if entry.counterpart is None or entry.counterpart not in by_name:
            continue
        variant = by_name[entry.name]
        counter = by_name[entry.counterpart]
        variant.delta = tuple(v - c for v, c in zip(variant.mean, counter.mean))
        wins = sum(1 for v, c in zip(variant.per_seed, counter.per_seed)
                   if v[0] > c[0])
        margin_ok = variant.mean[0] >= counter.mean[0] - H1_MARGIN_POINTS / 100.0
        # strictly better on at least two thirds of the seeds (2 of 3)
        majority = wins * 3 >= 2 * len(seeds) if len(seeds) >= 3 else wins >= 1
        pair_flags.append(PairFlag(
            name=f"{entry.name} vs {entry.counterpart}",
            passed=bool(margin_ok and majority),
            wins=wins, n_seeds=len(seeds),
            delta_r1=variant.delta[0]))

    h2 = None
    doc_base = next((e.name for e in entries
                     if e.config.model == "document" and not e.config.bidi), None)
    sent_base = next((e.name for e in entries
                      if e.config.model == "sentence" and not e.config.bidi), None)
    if doc_base and sent_base:
        delta = by_name[sent_base].mean[0] - by_name[doc_base].mean[0]
        h2 = {"passed": bool(delta > 0), "delta_r1": delta}

    return MatrixReport(rows=rows, pair_flags=pair_flags, h2=h2, seeds=seeds)
