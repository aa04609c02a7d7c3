"""Intrinsic evaluation of ranked selections over nested prefixes."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .corpus import CorpusError, TokenizedCorpus
from .lm import DEFAULT_PAD, EVALUATION_ORDER, corpus_perplexity, oov_tokens, train_kn
from .representations import restore_original
from .selection_ml import RankedSelection


@dataclass(frozen=True)
class CurvePoint:
    selection_size: int
    perplexity: float
    oov_tokens: int
    avg_sentence_length: float


def length_stats(corpus: TokenizedCorpus) -> float:
    if len(corpus) == 0:
        raise CorpusError("average sentence length of an empty corpus is undefined")
    return corpus.token_count / len(corpus)


def evaluate_subset(subset: TokenizedCorpus, task: TokenizedCorpus,
                    lm_order: int = EVALUATION_ORDER, pad: int = DEFAULT_PAD) -> CurvePoint:
    model = train_kn(subset, lm_order, pad)
    return CurvePoint(len(subset), corpus_perplexity(model, task),
                      oov_tokens(model.vocab, task), length_stats(subset))


def _job(args):
    return evaluate_subset(*args)


def evaluate_prefixes(ranking: RankedSelection, pool: TokenizedCorpus, task: TokenizedCorpus,
                      sizes: Sequence[int], lm_order: int = EVALUATION_ORDER,
                      pad: int = DEFAULT_PAD, threads: int = 1) -> list[CurvePoint]:
    """Train an LM on each ranked prefix and score it on the full task corpus."""
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("prefix sizes must be ascending")
    for n in sizes:
        if n < 1 or n > len(ranking):
            raise ValueError("prefix size %d outside [1, %d]" % (n, len(ranking)))
    ordered = restore_original(ranking.line_indices[:max(sizes, default=0)], pool)
    jobs = [(ordered.subset(range(n)), task, lm_order, pad) for n in sizes]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(_job, jobs))
    return [_job(j) for j in jobs]


def oov_curve(ranking: RankedSelection, pool: TokenizedCorpus, task: TokenizedCorpus) -> list[int]:
    """Task OOV token count after each prefix size 1..len(ranking), in one pass."""
    task_counts: dict[str, int] = {}
    for s in task.sentences:
        for w in s:
            task_counts[w] = task_counts.get(w, 0) + 1
    remaining = sum(task_counts.values())
    seen = set()
    out = []
    pos = {li: i for i, li in enumerate(pool.line_index)}
    for li in ranking.line_indices:
        for w in pool.sentences[pos[li]]:
            if w not in seen:
                seen.add(w)
                remaining -= task_counts.get(w, 0)
        out.append(remaining)
    return out


def save_curve(points: Sequence[CurvePoint], path, method_tag: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("# method=%s\n" % method_tag)
        f.write("size\tperplexity\toov_tokens\tavg_len\n")
        for p in points:
            f.write("%d\t%.6f\t%d\t%.6f\n" % (p.selection_size, p.perplexity, p.oov_tokens,
                                             p.avg_sentence_length))


def load_curve(path) -> tuple[str, list[CurvePoint]]:
    lines = open(path, encoding="utf-8").read().splitlines()
    tag = lines[0].split("=", 1)[1] if lines and lines[0].startswith("# method=") else ""
    points = []
    for line in lines[2:]:
        n, ppl, oov, avg = line.split("\t")
        points.append(CurvePoint(int(n), float(ppl), int(oov), float(avg)))
    return tag, points
