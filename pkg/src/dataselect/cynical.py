"""Cynical data selection: greedy, incremental construction of a training
set whose unigram model has minimal cross-entropy on the task.

The model is a unigram over reduced-lexicon symbols.  With task distribution
p(v), selected counts c(v) (add-delta initialized) and W = sum c(v), the
current cross-entropy is H = sum_v p(v) ln(W / c(v)).  Adding a sentence s
with per-symbol counts s(v) and length |s| changes it by

    dH = ln((W + |s|) / W) - sum_v p(v) ln((c(v) + s(v)) / c(v))

a length penalty minus a task-relevance gain.  Each iteration picks the
symbol whose single-token addition lowers H most, then the unpicked sentence
containing it with the most negative dH (or the best floor(ln k) of them in
batch mode, k being the number of candidates, scored against the pre-batch
state).  Empty sentences contain no word; they change nothing and are
appended last, in line order.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .corpus import TokenizedCorpus
from .representations import ReducedLexicon
from .selection_ml import RankedSelection

log = logging.getLogger(__name__)

TIE_TOL = 1e-12


class CynicalError(ValueError):
    pass


def batch_size(k: int) -> int:
    if k < 1:
        raise ValueError("batch size needs k >= 1, got %d" % k)
    return max(1, math.floor(math.log(k)))


@dataclass
class CynicalState:
    symbols: list[str]
    task_dist: np.ndarray
    sel_counts: np.ndarray
    W_sel: float
    H_cur: float
    picked: list[int] = field(default_factory=list)   # pool line indices, selection order
    scores: list[float] = field(default_factory=list)
    words: list[str] = field(default_factory=list)

    def recompute_entropy(self) -> float:
        p, c = self.task_dist, self.sel_counts
        nz = p > 0
        return float(np.sum(p[nz] * np.log(self.W_sel / c[nz])))

    def to_json(self) -> dict:
        return {"symbols": self.symbols,
                "task_dist": self.task_dist.tolist(),
                "sel_counts": self.sel_counts.tolist(),
                "W_sel": self.W_sel, "H_cur": self.H_cur,
                "picked": self.picked, "scores": self.scores, "words": self.words}

    @classmethod
    def from_json(cls, d: dict) -> "CynicalState":
        return cls(list(d["symbols"]), np.array(d["task_dist"]), np.array(d["sel_counts"]),
                   float(d["W_sel"]), float(d["H_cur"]), list(d["picked"]),
                   list(d["scores"]), list(d["words"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "CynicalState":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class CynicalSelection(RankedSelection):
    words: tuple[str, ...] = ()

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for (rank, li, score), w in zip(self.entries, self.words):
                f.write("%d\t%d\t%r\t%s\n" % (rank, li, score, w))

    @classmethod
    def load(cls, path, method_tag: str = "cynical") -> "CynicalSelection":
        entries, words = [], []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line:
                rank, li, score, w = line.split("\t")
                entries.append((int(rank), int(li), float(score)))
                words.append(w)
        return cls(tuple(entries), method_tag, tuple(words))


class CynicalSelector:
    """Holds the pool, its inverted index and the evolving CynicalState."""

    def __init__(self, task: TokenizedCorpus, pool: TokenizedCorpus, delta: float = 1.0,
                 state: CynicalState | None = None):
        """``task`` and ``pool`` hold reduced-lexicon symbols."""
        symbols = sorted(task.vocab() | pool.vocab())
        if not symbols:
            raise CynicalError("empty reduced lexicon")
        if task.token_count == 0:
            raise CynicalError("task corpus has no tokens")
        if delta <= 0:
            raise CynicalError("smoothing delta must be positive")
        sid = {v: i for i, v in enumerate(symbols)}
        V = len(symbols)

        rows, cols, vals = [], [], []
        for r, s in enumerate(pool.sentences):
            uniq, cnt = np.unique(np.fromiter((sid[v] for v in s), dtype=np.int64, count=len(s)),
                                  return_counts=True)
            rows.extend([r] * len(uniq))
            cols.extend(uniq.tolist())
            vals.extend(cnt.tolist())
        self.counts = sparse.csr_matrix((np.array(vals, dtype=float), (rows, cols)),
                                        shape=(len(pool), V))
        self.lengths = np.array([len(s) for s in pool.sentences], dtype=float)
        by_symbol = self.counts.tocsc()
        self.inverted = [by_symbol.indices[by_symbol.indptr[v]:by_symbol.indptr[v + 1]].copy()
                         for v in range(V)]
        self.pool = pool
        self.position = {li: r for r, li in enumerate(pool.line_index)}

        task_counts = np.zeros(V)
        for s in task.sentences:
            for v in s:
                task_counts[sid[v]] += 1
        p = task_counts / task_counts.sum()
        if state is None:
            c = np.full(V, float(delta))
            state = CynicalState(symbols, p, c, float(c.sum()), 0.0)
            state.H_cur = state.recompute_entropy()
        elif state.symbols != symbols:
            raise CynicalError("resume state was built over a different lexicon")
        self.state = state
        self.picked_mask = np.zeros(len(pool), dtype=bool)
        self.available = np.array([len(ix) for ix in self.inverted])
        for li in state.picked:
            r = self.position[li]
            self.picked_mask[r] = True
            self.available[self.counts.indices[self.counts.indptr[r]:self.counts.indptr[r + 1]]] -= 1

    # -- scoring ------------------------------------------------------------
    def word_gains(self, cands: np.ndarray | None = None) -> np.ndarray:
        st = self.state
        if cands is None:
            cands = np.arange(len(st.symbols))
        return np.log1p(1.0 / st.W_sel) - st.task_dist[cands] * np.log1p(1.0 / st.sel_counts[cands])

    def word_gain(self, symbol: str) -> float:
        try:
            v = self.state.symbols.index(symbol)
        except ValueError:
            raise CynicalError("unknown symbol %r" % symbol) from None
        return float(self.word_gains(np.array([v]))[0])

    def sentence_deltas(self, rows: np.ndarray) -> np.ndarray:
        st = self.state
        sub = self.counts[rows]
        idx, cnt = sub.indices, sub.data
        gain = st.task_dist[idx] * np.log1p(cnt / st.sel_counts[idx])
        owner = np.repeat(np.arange(len(rows)), np.diff(sub.indptr))
        gains = np.bincount(owner, weights=gain, minlength=len(rows))
        return np.log1p(self.lengths[rows] / st.W_sel) - gains

    def sentence_delta(self, sentence: Sequence[str]) -> float:
        st = self.state
        sid = {v: i for i, v in enumerate(st.symbols)}
        counts: dict[int, int] = {}
        for v in sentence:
            counts[sid[v]] = counts.get(sid[v], 0) + 1
        gain = sum(st.task_dist[v] * math.log1p(n / st.sel_counts[v]) for v, n in counts.items())
        return math.log1p(len(sentence) / st.W_sel) - gain

    # -- selection ----------------------------------------------------------
    def best_word(self) -> int | None:
        cands = np.flatnonzero(self.available > 0)
        if len(cands) == 0:
            return None
        gains = self.word_gains(cands)
        return int(cands[np.flatnonzero(gains <= gains.min() + TIE_TOL)[0]])

    def _add(self, r: int, word: str) -> float:
        st = self.state
        d = float(self.sentence_deltas(np.array([r]))[0])
        lo, hi = self.counts.indptr[r], self.counts.indptr[r + 1]
        idx = self.counts.indices[lo:hi]
        st.sel_counts[idx] += self.counts.data[lo:hi]
        st.W_sel += self.lengths[r]
        st.H_cur += d
        self.picked_mask[r] = True
        self.available[idx] -= 1
        li = self.pool.line_index[r]
        st.picked.append(li)
        st.scores.append(d)
        st.words.append(word)
        return d

    def step(self, batch: bool = False, limit: int | None = None) -> list[int]:
        """One iteration; returns the pool line indices added (empty when done)."""
        v = self.best_word()
        if v is None:
            # only empty sentences remain; each leaves H unchanged
            rows = np.flatnonzero(~self.picked_mask)
            if len(rows) == 0:
                return []
            n = batch_size(len(rows)) if batch else 1
            chosen = [int(r) for r in rows[:n if limit is None else min(n, limit)]]
            for r in chosen:
                self._add(r, "")
            return [self.pool.line_index[r] for r in chosen]
        rows = self.inverted[v]
        rows = rows[~self.picked_mask[rows]]
        deltas = self.sentence_deltas(rows)
        first = int(rows[np.flatnonzero(deltas <= deltas.min() + TIE_TOL)].min())
        chosen = [first]
        if batch:
            b = batch_size(len(rows))
            if limit is not None:
                b = min(b, limit)
            order = np.lexsort((rows, deltas))
            chosen += [int(rows[i]) for i in order if rows[i] != first][:b - 1]
        word = self.state.symbols[v]
        for r in chosen:
            self._add(r, word)
        return [self.pool.line_index[r] for r in chosen]

    def run(self, budget: int, batch: bool = False) -> CynicalState:
        st = self.state
        while len(st.picked) < budget:
            added = self.step(batch, limit=budget - len(st.picked))
            if not added:
                break
            if len(st.picked) % 1000 < len(added):
                log.info("cynical: %d selected, H=%.6f", len(st.picked), st.H_cur)
        return st

    def selection(self) -> CynicalSelection:
        st = self.state
        return CynicalSelection(tuple((i, li, s) for i, (li, s) in enumerate(zip(st.picked, st.scores))),
                                "cynical", tuple(st.words))


def cynical_select(task: TokenizedCorpus, pool: TokenizedCorpus, lexicon: ReducedLexicon,
                   budget: int, batch: bool = False, delta: float = 1.0,
                   resume: CynicalState | None = None) -> tuple[CynicalSelection, CynicalState]:
    if budget < 0:
        raise CynicalError("budget must be >= 0")
    if budget > len(pool):
        raise CynicalError("budget %d exceeds pool size %d" % (budget, len(pool)))
    if not lexicon.mapping:
        raise CynicalError("empty reduced lexicon")
    sel = CynicalSelector(lexicon.reduce_corpus(task), lexicon.reduce_corpus(pool), delta, resume)
    state = sel.run(budget, batch)
    return sel.selection(), state
