"""Command-line interface.

Commands: synth, prep, train, eval, summarize, baseline, rouge, matrix.
Training options mirror the RunConfig fields; a key=value config file
can seed them and explicit flags win. Every error contract surfaces as a
message on stderr and a nonzero exit code.
"""

import argparse
import json
import sys
from dataclasses import fields, replace

from beginsum import baselines as baselines_mod
from beginsum import checkpoint as ckpt_io
from beginsum import corpus as corpus_mod
from beginsum import encoders, rouge, synth
from beginsum.experiments import MatrixEntry, default_entries, run_matrix
from beginsum.training import (RunConfig, evaluate_checkpoint,
                               pipeline_from_checkpoint, prepare, train)


def _add_config_options(parser):
    parser.add_argument("--config", help="key=value config file")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        hint = str(f.type)
        if "bool" in hint:
            parser.add_argument(flag, action="store_true", default=None)
        elif "int" in hint:
            parser.add_argument(flag, type=int, default=None)
        elif "float" in hint:
            parser.add_argument(flag, type=float, default=None)
        else:
            parser.add_argument(flag, default=None)


def _config_from_args(args):
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    return replace(config, **overrides) if overrides else config


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)


def _load_contextual_if_needed(config, override_path=None):
    path = override_path or config.contextual_path
    if config.contextual:
        if not path:
            raise ValueError("contextual model needs --contextual-path")
        return encoders.load_contextual(path)
    return None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_synth(args):
    rule = synth.SalienceRule(
        min_overlap=args.min_overlap, salient_prob=args.salient_prob,
        replies=(args.min_replies, args.max_replies))
    threads = synth.synth_threads(args.count, seed=args.seed, rule=rule)
    corpus_mod.write_jsonl(threads, args.out)
    print(f"wrote {len(threads)} threads to {args.out}")
    return 0


def _cmd_prep(args):
    config = _config_from_args(args)
    threads = corpus_mod.read_jsonl(args.corpus)
    vocab, docs = prepare(threads, config)
    cache = {
        "config": config.to_dict(),
        "vocab": vocab.to_dict(),
        "docs": [d.to_dict() for d in docs],
    }
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(cache, f, sort_keys=True)
    print(f"prepared {len(docs)} documents (vocab size {vocab.size}) -> {args.out}")
    return 0


def _cmd_train(args):
    config = _config_from_args(args)
    train_threads = corpus_mod.read_jsonl(args.train)
    dev_threads = corpus_mod.read_jsonl(args.dev)
    vectors = _load_contextual_if_needed(config)
    result = train(config, train_threads, dev_threads, contextual_vectors=vectors)
    ckpt_io.save(result.checkpoint, args.checkpoint)
    if args.history:
        lines = ["epoch\ttrain_loss\tdev_rouge"]
        lines += [f"{h['epoch']}\t{h['train_loss']:.6f}\t{h['dev_rouge']:.6f}"
                  for h in result.history]
        _write(args.history, "\n".join(lines) + "\n")
    print(f"best epoch {result.best_epoch} (dev rouge {result.best_dev:.4f}) "
          f"-> {args.checkpoint}")
    return 0


def _cmd_eval(args):
    ckpt = ckpt_io.load(args.checkpoint)
    threads = corpus_mod.read_jsonl(args.corpus)
    config = RunConfig.from_dict(ckpt["config"])
    vectors = _load_contextual_if_needed(config, args.contextual_path)
    report = evaluate_checkpoint(ckpt, threads, name=args.name,
                                 contextual_vectors=vectors)
    _write(args.report, report.score_tsv())
    if args.lengths:
        _write(args.lengths, report.lengths_tsv())
    if args.per_doc:
        _write(args.per_doc, report.per_doc_tsv())
    if report.skipped:
        print(f"warning: {len(report.skipped)} documents had no reference "
              f"and were skipped", file=sys.stderr)
    return 0


def _cmd_summarize(args):
    ckpt = ckpt_io.load(args.checkpoint)
    config = RunConfig.from_dict(ckpt["config"])
    vectors = _load_contextual_if_needed(config, args.contextual_path)
    pipeline = pipeline_from_checkpoint(ckpt, contextual_vectors=vectors)

    if args.text:
        with open(args.text, encoding="utf-8") as f:
            threads = [corpus_mod.RawThread(id="stdin-doc", comments=[f.read()])]
    else:
        threads = corpus_mod.read_jsonl(args.input)
    _, docs = prepare(threads, pipeline.config, vocab=pipeline.vocab)
    out = []
    for doc in docs:
        summary = pipeline.summarize(doc)
        out.append(f"# {doc.doc_id}\n{summary.text()}\n")
        if not summary.indices:
            print(f"warning: empty summary for {doc.doc_id}", file=sys.stderr)
    _write(args.out, "".join(out))
    return 0


def _cmd_baseline(args):
    config = _config_from_args(args)
    threads = corpus_mod.read_jsonl(args.corpus)
    vocab, docs = prepare(threads, config)

    if args.method == "lead":
        summarize = lambda doc: baselines_mod.lead_summary(doc, n=args.lead_n)
        name = f"lead{args.lead_n}"
    else:
        if args.space and not args.fit:
            space = baselines_mod.load_space(args.space)
        else:
            fit_threads = corpus_mod.read_jsonl(args.fit) if args.fit else threads
            _, fit_docs = prepare(fit_threads, config, vocab=vocab)
            sentences = [toks for doc in fit_docs for toks in doc.tokens]
            space = baselines_mod.fit_lsa(sentences, dims=args.dims)
            if args.space:
                baselines_mod.save_space(space, args.space)
        summarize = lambda doc: baselines_mod.kmeans_extract(doc, space,
                                                             seed=config.seed)
        name = "lsa+kmeans"

    results = []
    for doc in docs:
        ref = corpus_mod.reference_text(doc)
        if ref is None:
            continue
        results.append(rouge.score_summary(summarize(doc).text(), ref))
    if not results:
        raise ValueError("no document carries a reference to score against")
    _write(args.report, rouge.format_report_rows(
        [(name, rouge.corpus_average(results))]))
    return 0


def _cmd_rouge(args):
    with open(args.candidate, encoding="utf-8") as f:
        cand = f.read()
    with open(args.reference, encoding="utf-8") as f:
        ref = f.read()
    res = rouge.score_summary(cand, ref)
    _write(args.out, rouge.format_report_rows([("candidate", res)]))
    return 0


def _cmd_matrix(args):
    config = _config_from_args(args)
    train_threads = corpus_mod.read_jsonl(args.train)
    dev_threads = corpus_mod.read_jsonl(args.dev)
    test_threads = corpus_mod.read_jsonl(args.test)
    seeds = [int(s) for s in args.seeds.split(",") if s.strip() != ""]

    entries = default_entries(config)
    if args.models:
        wanted = set(args.models.split(","))
        entries = [e for e in entries if e.name in wanted]
        if len(entries) < 2:
            raise ValueError(f"--models must keep at least two of "
                             f"{[e.name for e in default_entries(config)]}")

    def progress(name, seed, scores):
        print(f"[matrix] {name} seed={seed} R1={scores[0] * 100:.2f}", file=sys.stderr)

    report = run_matrix(train_threads, dev_threads, test_threads, entries, seeds,
                        include_baselines=not args.no_baselines,
                        lsa_dims=args.dims, progress=progress)
    _write(args.out, report.to_tsv())
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="beginsum")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic thread corpus")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--salient-prob", type=float, default=0.5)
    p.add_argument("--min-overlap", type=float, default=0.5)
    p.add_argument("--min-replies", type=int, default=6)
    p.add_argument("--max-replies", type=int, default=10)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("prep", help="preprocess a corpus into a cache file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    _add_config_options(p)
    p.set_defaults(func=_cmd_prep)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--train", required=True)
    p.add_argument("--dev", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--history")
    _add_config_options(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint on a corpus")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--report", default="-")
    p.add_argument("--lengths")
    p.add_argument("--per-doc")
    p.add_argument("--name")
    p.add_argument("--contextual-path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("summarize", help="summarize documents with a checkpoint")
    p.add_argument("--checkpoint", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", help="JSONL documents")
    group.add_argument("--text", help="plain text file treated as one document")
    p.add_argument("--out", default="-")
    p.add_argument("--contextual-path")
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("baseline", help="run a non-neural baseline")
    p.add_argument("--corpus", required=True)
    p.add_argument("--method", choices=("lsa", "lead"), default="lsa")
    p.add_argument("--fit", help="corpus to fit the LSA space on")
    p.add_argument("--space", help="LSA space file to save/reuse")
    p.add_argument("--dims", type=int, default=200)
    p.add_argument("--lead-n", type=int, default=3)
    p.add_argument("--report", default="-")
    _add_config_options(p)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("rouge", help="score a candidate file against a reference")
    p.add_argument("--candidate", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_rouge)

    p = sub.add_parser("matrix", help="run the comparative experiment matrix")
    p.add_argument("--train", required=True)
    p.add_argument("--dev", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--models", help="comma-separated entry names to keep")
    p.add_argument("--no-baselines", action="store_true")
    p.add_argument("--dims", type=int, default=50)
    p.add_argument("--out", default="-")
    _add_config_options(p)
    p.set_defaults(func=_cmd_matrix)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
