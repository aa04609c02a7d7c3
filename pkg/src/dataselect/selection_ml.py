"""Moore-Lewis cross-entropy difference scoring and ranking."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import ParallelCorpus, TokenizedCorpus
from .lm import NGramModel, sentence_cross_entropy


@dataclass(frozen=True)
class SentenceScore:
    line_index: int
    score: float


@dataclass(frozen=True)
class RankedSelection:
    entries: tuple[tuple[int, int, float], ...]   # (rank, line_index, score)
    method_tag: str = ""

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def line_indices(self) -> list[int]:
        return [li for _, li, _ in self.entries]

    def prefix(self, n: int) -> "RankedSelection":
        return RankedSelection(self.entries[:n], self.method_tag)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for rank, li, score in self.entries:
                f.write("%d\t%d\t%r\n" % (rank, li, score))

    @classmethod
    def load(cls, path, method_tag: str = "") -> "RankedSelection":
        entries = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line:
                rank, li, score = line.split("\t")[:3]
                entries.append((int(rank), int(li), float(score)))
        return cls(tuple(entries), method_tag)


def score_moore_lewis(task_lm: NGramModel, pool_lm: NGramModel,
                      corpus: TokenizedCorpus) -> list[SentenceScore]:
    """H_task(s) - H_pool(s) per sentence; lower is more task-like."""
    return [SentenceScore(li, sentence_cross_entropy(task_lm, s) - sentence_cross_entropy(pool_lm, s))
            for li, s in zip(corpus.line_index, corpus.sentences)]


def score_bilingual(task_lms: Sequence[NGramModel], pool_lms: Sequence[NGramModel],
                    corpus: ParallelCorpus) -> list[SentenceScore]:
    src = score_moore_lewis(task_lms[0], pool_lms[0], corpus.source)
    tgt = score_moore_lewis(task_lms[1], pool_lms[1], corpus.target)
    return [SentenceScore(a.line_index, a.score + b.score) for a, b in zip(src, tgt)]


def rank_and_select(scores: Iterable[SentenceScore], n: int | None = None,
                    method_tag: str = "") -> RankedSelection:
    if n is not None and n < 0:
        raise ValueError("selection size must be >= 0")
    ranked = sorted(scores, key=lambda s: (s.score, s.line_index))
    if n is not None:
        ranked = ranked[:n]
    return RankedSelection(tuple((r, s.line_index, s.score) for r, s in enumerate(ranked)),
                           method_tag)


def save_scores(scores: Iterable[SentenceScore], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for s in scores:
            f.write("%d\t%r\n" % (s.line_index, s.score))


def load_scores(path) -> list[SentenceScore]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line:
            li, score = line.split("\t")
            out.append(SentenceScore(int(li), float(score)))
    return out
