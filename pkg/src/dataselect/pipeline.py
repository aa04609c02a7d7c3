"""Stage functions behind the command line, and the end-to-end ``run``."""
from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

from .clustering import ClusterMap, brown_cluster
from .config import BILINGUAL, ConfigError, PipelineConfig
from .corpus import ParallelCorpus, TokenizedCorpus, count_vocab, load_corpus, load_parallel
from .cynical import CynicalState, cynical_select
from .evaluation import evaluate_prefixes, save_curve
from .lm import train_kn
from .representations import reduce_vocab_cynical, restore_original, transform_ldm
from .selection_ml import (RankedSelection, rank_and_select, save_scores, score_bilingual,
                           score_moore_lewis)

log = logging.getLogger(__name__)


def _sides(cfg: PipelineConfig):
    """[(task, pool)] per language side."""
    if cfg.method in BILINGUAL:
        task = load_parallel(cfg.task, cfg.task_tgt)
        pool = load_parallel(cfg.pool, cfg.pool_tgt)
        return [(task.source, pool.source), (task.target, pool.target)]
    return [(load_corpus(cfg.task), load_corpus(cfg.pool))]


def ml_scores(sides, order: int, pad: int):
    models = []
    for task, pool in sides:
        log.info("training order-%d task/pool models (%d / %d sentences)", order, len(task), len(pool))
        models.append((train_kn(task, order, pad), train_kn(pool, order, pad)))
    if len(sides) == 1:
        return score_moore_lewis(models[0][0], models[0][1], sides[0][1])
    pool = ParallelCorpus(sides[0][1], sides[1][1])
    return score_bilingual([m[0] for m in models], [m[1] for m in models], pool)


def clusters_for(task: TokenizedCorpus, pool: TokenizedCorpus, cfg: PipelineConfig) -> ClusterMap:
    if cfg.cluster_file:
        return ClusterMap.load(cfg.cluster_file)
    log.info("brown clustering %d clusters (min count %d)", cfg.clusters, cfg.min_count)
    return brown_cluster(task.concat(pool), cfg.clusters, cfg.min_count)


def ldm_sides(sides, cfg: PipelineConfig, out: Path | None = None):
    tagged = []
    suffixes = [""] if len(sides) == 1 else [".src", ".tgt"]
    for (task, pool), sfx in zip(sides, suffixes):
        cm = clusters_for(task, pool, cfg)
        ts, ps = count_vocab(task), count_vocab(pool)
        dt, dp = transform_ldm(task, cm, ts, ps), transform_ldm(pool, cm, ts, ps)
        if out is not None:
            if not cfg.cluster_file:
                cm.save(out / ("clusters%s.tsv" % sfx))
            dt.tags.save(out / ("task.ldm%s.txt" % sfx))
            dp.tags.save(out / ("pool.ldm%s.txt" % sfx))
        tagged.append((dt.tags, dp.tags))
    return tagged


def select(cfg: PipelineConfig, out: Path, resume: str | None = None) -> RankedSelection:
    """Score and rank the pool with the configured method; writes ranking files."""
    out.mkdir(parents=True, exist_ok=True)
    sides = _sides(cfg)
    pool = sides[0][1]
    if cfg.method == "cynical":
        task = sides[0][0]
        budget = len(pool) if cfg.budget is None else cfg.budget
        lex = reduce_vocab_cynical(count_vocab(task), count_vocab(pool),
                                   cfg.bad_suffix, cfg.split_boring)
        lex.save(out / "lexicon.tsv")
        state = CynicalState.load(resume) if resume else None
        ranking, state = cynical_select(task, pool, lex, budget, cfg.batch, cfg.delta, state)
        ranking.save(out / "cynical.tsv")
        state.save(out / "cynical_state.json")
    else:
        if cfg.method.startswith("ldm"):
            sides = ldm_sides(sides, cfg, out)
        scores = ml_scores(sides, cfg.order, cfg.pad)
        save_scores(scores, out / "scores.tsv")
        ranking = rank_and_select(scores, cfg.budget, cfg.method)
    ranking = RankedSelection(ranking.entries, cfg.method)
    ranking.save(out / "ranking.tsv")
    return ranking


def extract(ranking: RankedSelection, pools, out: Path, sizes=(), name="selected"):
    """Write the original sentences of ranked prefixes; returns written paths."""
    paths = []
    suffixes = [""] if len(pools) == 1 else ["", ".tgt"]
    targets = [(None, ranking.line_indices)] + [(n, ranking.line_indices[:n]) for n in sizes]
    for n, idx in targets:
        if n is not None and n > len(ranking):
            raise ConfigError("size %d exceeds the %d ranked sentences" % (n, len(ranking)))
        for pool, sfx in zip(pools, suffixes):
            p = out / ("%s%s%s.txt" % (name, "" if n is None else ".%d" % n, sfx))
            restore_original(idx, pool).save(p)
            paths.append(p)
    return paths


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(cfg: PipelineConfig) -> dict:
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.to_json(), encoding="utf-8")
    pools = [load_corpus(cfg.pool)]
    if cfg.method in BILINGUAL:
        pools.append(load_corpus(cfg.pool_tgt))
    limit = len(pools[0]) if cfg.budget is None else min(cfg.budget, len(pools[0]))
    if cfg.sizes and cfg.sizes[-1] > limit:
        raise ConfigError("largest size %d exceeds the selection limit %d" % (cfg.sizes[-1], limit))
    ranking = select(cfg, out)
    extract(ranking, pools, out, cfg.sizes)
    if cfg.sizes:
        points = evaluate_prefixes(ranking, pools[0], load_corpus(cfg.task), cfg.sizes,
                                   cfg.eval_order, cfg.pad, cfg.threads)
        save_curve(points, out / "curves.tsv", cfg.method)
    manifest = {"config": cfg.to_dict(),
                "artifacts": {p.name: sha256(p) for p in sorted(out.iterdir())
                              if p.is_file() and p.name != "manifest.json"}}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    return manifest
