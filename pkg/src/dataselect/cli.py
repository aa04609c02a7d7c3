"""Command-line entry point: ``dataselect <subcommand> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .arpa import write_arpa
from .clustering import brown_cluster
from .config import METHODS, ConfigError, PipelineConfig
from .corpus import CorpusError, count_vocab, load_corpus
from .cynical import CynicalError
from .evaluation import evaluate_prefixes, save_curve
from .lm import LMError, train_kn
from .representations import reduce_vocab_cynical
from .selection_ml import RankedSelection

log = logging.getLogger("dataselect")


def _sizes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("--sizes expects comma-separated integers, got %r" % text)


def _common(p: argparse.ArgumentParser, *names: str) -> None:
    """Attach the shared pipeline flags; defaults are None so config values win."""
    specs = {
        "task": dict(help="task (in-domain) corpus, one sentence per line"),
        "pool": dict(help="pool corpus to select from"),
        "task-tgt": dict(help="target side of a parallel task corpus"),
        "pool-tgt": dict(help="target side of a parallel pool corpus"),
        "method": dict(choices=METHODS),
        "order": dict(type=int, help="n-gram order of the selection LMs"),
        "eval-order": dict(type=int, help="n-gram order of the evaluation LMs"),
        "pad": dict(type=int, help="padded vocabulary size"),
        "clusters": dict(type=int, help="number of word clusters"),
        "min-count": dict(type=int, help="words rarer than this share the UNK cluster"),
        "cluster-file": dict(help="precomputed clusters (bit<TAB>word<TAB>count)"),
        "budget": dict(type=int, help="number of sentences to select"),
        "sizes": dict(type=_sizes, help="comma-separated prefix sizes to extract/evaluate"),
        "threads": dict(type=int, help="worker processes for prefix evaluation"),
        "seed": dict(type=int),
        "delta": dict(type=float, help="add-delta initialization of cynical counts"),
    }
    for n in names:
        p.add_argument("--" + n, default=None, **specs[n])


def _flag(p: argparse.ArgumentParser, name: str, help: str) -> None:
    p.add_argument("--" + name, action="store_true", default=None, help=help)


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if getattr(args, "config", None) else PipelineConfig()
    keys = {f for f in cfg.to_dict() if f != "out"}
    cfg = cfg.override(**{k: v for k, v in vars(args).items() if k in keys})
    if getattr(args, "out", None):
        cfg = cfg.override(out=args.out)
    return cfg.validate()


def cmd_train_lm(args) -> None:
    model = train_kn(load_corpus(args.corpus), args.order, args.pad)
    write_arpa(model, args.out)


def cmd_cluster(args) -> None:
    corpus = load_corpus(args.task)
    if args.pool:
        corpus = corpus.concat(load_corpus(args.pool))
    brown_cluster(corpus, args.clusters, args.min_count).save(args.out)


def cmd_transform(args) -> None:
    cfg = _config(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    sides = pipeline._sides(cfg)
    if args.kind == "ldm":
        pipeline.ldm_sides(sides, cfg, out)
        return
    task, pool = sides[0]
    lex = reduce_vocab_cynical(count_vocab(task), count_vocab(pool), cfg.bad_suffix, cfg.split_boring)
    lex.save(out / "lexicon.tsv")
    lex.reduce_corpus(task).save(out / "task.reduced.txt")
    lex.reduce_corpus(pool).save(out / "pool.reduced.txt")


def cmd_select(args) -> None:
    cfg = _config(args)
    pipeline.select(cfg, Path(cfg.out), resume=args.resume)


def cmd_extract(args) -> None:
    ranking = RankedSelection.load(args.ranking)
    pools = [load_corpus(args.pool)] + ([load_corpus(args.pool_tgt)] if args.pool_tgt else [])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pipeline.extract(ranking, pools, out, args.sizes or [])


def cmd_eval(args) -> None:
    ranking = RankedSelection.load(args.ranking)
    points = evaluate_prefixes(ranking, load_corpus(args.pool), load_corpus(args.task),
                               args.sizes, args.order, args.pad, args.threads)
    save_curve(points, args.out, args.method_tag)


def cmd_run(args) -> None:
    pipeline.run(_config(args))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dataselect", description="Task-relevant data selection.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-lm", help="train a Kneser-Ney model and write ARPA")
    p.add_argument("--corpus", required=True)
    p.add_argument("--order", type=int, default=PipelineConfig.order)
    p.add_argument("--pad", type=int, default=PipelineConfig.pad)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("cluster", help="Brown-cluster task+pool text")
    p.add_argument("--task", required=True)
    p.add_argument("--pool")
    p.add_argument("--clusters", type=int, default=PipelineConfig.clusters)
    p.add_argument("--min-count", type=int, default=PipelineConfig.min_count)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("transform", help="write LDM tag corpora or the cynical reduced lexicon")
    p.add_argument("--kind", choices=("ldm", "cynical"), required=True)
    p.add_argument("--config")
    p.add_argument("--out")
    _common(p, "task", "pool", "task-tgt", "pool-tgt", "method", "clusters", "min-count",
            "cluster-file")
    _flag(p, "bad-suffix", "split __bad by bias suffix")
    _flag(p, "split-boring", "split __boring by bias suffix")
    p.set_defaults(func=cmd_transform)

    for name, func, text in (("select", cmd_select, "rank the pool with one method"),
                             ("run", cmd_run, "select, extract and evaluate end to end")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON pipeline config; flags override it")
        p.add_argument("--out")
        _common(p, "task", "pool", "task-tgt", "pool-tgt", "method", "order", "pad", "clusters",
                "min-count", "cluster-file", "budget", "delta", "seed", "threads")
        _flag(p, "batch", "cynical batch mode")
        _flag(p, "bad-suffix", "split __bad by bias suffix")
        _flag(p, "split-boring", "split __boring by bias suffix")
        if name == "select":
            p.add_argument("--resume", help="cynical state file to continue from")
        else:
            _common(p, "sizes", "eval-order")
        p.set_defaults(func=func)

    p = sub.add_parser("extract", help="write original sentences for ranked prefixes")
    p.add_argument("--ranking", required=True)
    p.add_argument("--pool", required=True)
    p.add_argument("--pool-tgt")
    p.add_argument("--sizes", type=_sizes)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("eval", help="perplexity/OOV/length curve over ranked prefixes")
    p.add_argument("--ranking", required=True)
    p.add_argument("--pool", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--sizes", type=_sizes, required=True)
    p.add_argument("--order", type=int, default=PipelineConfig.eval_order)
    p.add_argument("--pad", type=int, default=PipelineConfig.pad)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--method-tag", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, CorpusError, CynicalError, LMError, ValueError, OSError) as e:
        print("dataselect %s: error: %s" % (args.command, e), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
