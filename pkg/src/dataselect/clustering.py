"""Brown clustering by greedy average-mutual-information merging.

Frequency-window schedule: the ``num_clusters`` most frequent eligible words
start as singleton clusters; each further word is admitted as an extra
cluster and then the pair of clusters whose merge loses the least AMI is
merged.  Once every word is in, the remaining clusters keep merging down to
one, which yields the binary hierarchy (bit strings).

During the windowed phase the objective is computed over bigrams whose two
words have both been admitted, with each cluster's left/right marginals
taken from all eligible bigrams.  Once every word is admitted this is the
ordinary AMI of the class bigram distribution.

Losses live in a dense (C+1) x (C+1) table kept up to date after each
admission and merge, so a step costs O(C^2).
"""
from __future__ import annotations

import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .corpus import TokenizedCorpus

log = logging.getLogger(__name__)

UNK_LABEL = "UNK"
DEFAULT_CLUSTERS = 1000
DEFAULT_MIN_COUNT = 2
TIE_TOL = 1e-10


class ClusteringError(ValueError):
    pass


@dataclass
class ClusterMap:
    assignment: dict[str, int]
    num_clusters: int
    bit_strings: dict[str, str] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    merges: list[tuple[str, str, float]] = field(default_factory=list)

    @property
    def unk_label(self) -> int:
        return self.num_clusters

    def cluster_of(self, word: str) -> int:
        return self.assignment.get(word, self.unk_label)

    def label(self, word: str) -> str:
        cid = self.assignment.get(word)
        return UNK_LABEL if cid is None else str(cid)

    def clusters(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for w, c in self.assignment.items():
            out.setdefault(c, []).append(w)
        return {c: sorted(ws) for c, ws in sorted(out.items())}

    def save(self, path) -> None:
        rows = sorted(self.assignment, key=lambda w: (self.bit_strings.get(w, ""),
                                                      -self.counts.get(w, 0), w))
        with open(path, "w", encoding="utf-8") as f:
            for w in rows:
                f.write("%s\t%s\t%d\n" % (self.bit_strings[w], w, self.counts.get(w, 0)))

    @classmethod
    def load(cls, path) -> "ClusterMap":
        """Read ``bit_string<TAB>word<TAB>count`` lines; ids follow bit-string order."""
        bits, counts = {}, {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ClusteringError("%s:%d: expected bit_string<TAB>word<TAB>count" % (path, lineno))
            bits[parts[1]] = parts[0]
            counts[parts[1]] = int(parts[2]) if len(parts) > 2 and parts[2] else 0
        ids = {b: i for i, b in enumerate(sorted(set(bits.values())))}
        return cls({w: ids[b] for w, b in bits.items()}, len(ids), bits, counts)


def bigram_counts(corpus: TokenizedCorpus) -> Counter:
    pairs = Counter()
    for s in corpus.sentences:
        pairs.update(zip(s, s[1:]))
    return pairs


def ami(bigrams: Counter, partition: ClusterMap) -> float:
    """Average mutual information between the classes of adjacent words."""
    total = sum(bigrams.values())
    if total == 0:
        return 0.0
    joint = Counter()
    for (a, b), c in bigrams.items():
        joint[partition.cluster_of(a), partition.cluster_of(b)] += c
    left, right = Counter(), Counter()
    for (x, y), c in joint.items():
        left[x] += c
        right[y] += c
    out = 0.0
    for (x, y), c in joint.items():
        out += c / total * np.log(c * total / (left[x] * right[y]))
    return float(max(out, 0.0))


def _f(n, a, b):
    """n * ln(n / (a*b)) with 0 where n == 0."""
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = n * np.log(n / (a * b))
    return np.where(n > 0, out, 0.0)


def _h(n):
    """n * ln(n), 0 at 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(n > 0, n * np.log(n), 0.0)


def _safe_log(x):
    with np.errstate(divide="ignore"):
        return np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), 0.0)


class _Window:
    """Dense per-slot statistics of the clusters currently in the window.

    N holds bigram counts between slots, Q[x, y] = f(N[x, y], nl[x], nr[y]).
    Fr and Fc are the same terms with only the column (resp. row) marginal,
    which lets merge losses be assembled from row sums plus corrections over
    the few slots actually adjacent to the cluster being merged.
    """

    def __init__(self, size: int, total: float):
        self.N = np.zeros((size, size))
        self.Q = np.zeros((size, size))
        self.Fr = np.zeros((size, size))
        self.Fc = np.zeros((size, size))
        self.nl = np.zeros(size)
        self.nr = np.zeros(size)
        self.L = np.full((size, size), np.inf)
        self.active = np.zeros(size, dtype=bool)
        self.members: list[list[str] | None] = [None] * size
        self.total = total

    def rep(self, s: int) -> str:
        return self.members[s][0]

    def _act(self):
        return np.flatnonzero(self.active)

    def refresh_q(self, s: int):
        N, nl, nr = self.N, self.nl, self.nr
        self.Q[s, :] = _f(N[s, :], nl[s], nr)
        self.Q[:, s] = _f(N[:, s], nl, nr[s])
        self.Fr[s, :] = _f(N[s, :], 1.0, nr)
        self.Fr[:, s] = _f(N[:, s], 1.0, nr[s])
        self.Fc[s, :] = _f(N[s, :], nl[s], 1.0)
        self.Fc[:, s] = _f(N[:, s], nl, 1.0)

    def _adjacent(self, x: int) -> np.ndarray:
        return np.flatnonzero((self.N[x, :] > 0) | (self.N[:, x] > 0))

    def third_party(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        """Cluster x's contribution to the merge loss of every pair (i, j).

        Zero unless i or j is adjacent to x, so only rows S = adj(x) are
        returned: (S, G) with G[k, j] the contribution for pair (S[k], j).
        """
        N, Q, nl, nr = self.N, self.Q, self.nl, self.nr
        S = self._adjacent(x)
        a = Q[:, x] + Q[x, :]
        merged_in = _f(N[S, x][:, None] + N[:, x][None, :], nl[S][:, None] + nl[None, :], nr[x])
        merged_out = _f(N[x, S][:, None] + N[x, :][None, :], nl[x], nr[S][:, None] + nr[None, :])
        return S, a[S][:, None] + a[None, :] - merged_in - merged_out

    def _apply(self, x: int, sign: float):
        S, G = self.third_party(x)
        if len(S) == 0:
            return
        if sign < 0:
            G = -G
        L = self.L
        L[S, :] += G
        L[:, S] += G.T
        L[np.ix_(S, S)] -= G[:, S]

    def losses_for(self, s: int, cands: np.ndarray) -> np.ndarray:
        """Loss (times total) of merging s with each slot in cands."""
        if len(cands) == 0:
            return np.zeros(0)
        N, Q, nl, nr = self.N, self.Q, self.nl, self.nr
        c = cands
        rowQ, colQ = Q.sum(axis=1), Q.sum(axis=0)
        rowN, colN = N.sum(axis=1), N.sum(axis=0)
        PR, PC = self.Fr.sum(axis=1), self.Fc.sum(axis=0)
        before = rowQ[s] + colQ[s] + rowQ[c] + colQ[c] - Q[s, s] - Q[c, c] - Q[s, c] - Q[c, s]

        # bigrams (s|c, t): sum over t != s, c of f(N[s,t] + N[c,t], nl_s + nl_c, nr_t)
        S = np.flatnonzero(N[s, :] > 0)
        S = S[S != s]
        corr = _h(N[s, S][None, :] + N[np.ix_(c, S)]) - _h(N[np.ix_(c, S)]) \
            - N[s, S][None, :] * _safe_log(nr[S])[None, :]
        corr[c[:, None] == S[None, :]] = 0.0
        x_out = PR[c] - self.Fr[c, s] - self.Fr[c, c] + corr.sum(axis=1)
        m_out = rowN[s] - N[s, s] - N[s, c] + rowN[c] - N[c, s] - N[c, c]
        after_out = x_out - m_out * _safe_log(nl[s] + nl[c])

        # bigrams (t, s|c)
        S = np.flatnonzero(N[:, s] > 0)
        S = S[S != s]
        corr = _h(N[S, s][None, :] + N[np.ix_(S, c)].T) - _h(N[np.ix_(S, c)].T) \
            - N[S, s][None, :] * _safe_log(nl[S])[None, :]
        corr[c[:, None] == S[None, :]] = 0.0
        y_in = PC[c] - self.Fc[s, c] - self.Fc[c, c] + corr.sum(axis=1)
        m_in = colN[s] - N[s, s] - N[c, s] + colN[c] - N[s, c] - N[c, c]
        after_in = y_in - m_in * _safe_log(nr[s] + nr[c])

        self_after = _f(N[s, s] + N[c, c] + N[s, c] + N[c, s], nl[s] + nl[c], nr[s] + nr[c])
        return before - after_out - after_in - self_after

    def set_losses(self, s: int):
        act = self._act()
        others = act[act != s]
        vals = self.losses_for(s, others)
        self.L[s, :] = np.inf
        self.L[:, s] = np.inf
        self.L[s, others] = vals
        self.L[others, s] = vals

    def best_pair(self) -> tuple[int, int, float]:
        act = self._act()
        sub = self.L[np.ix_(act, act)]
        iu = np.triu_indices(len(act), 1)
        vals = sub[iu]
        lo = vals.min()
        tied = np.flatnonzero(vals <= lo + TIE_TOL * self.total)
        best = None
        for t in tied:
            i, j = act[iu[0][t]], act[iu[1][t]]
            ri, rj = self.rep(i), self.rep(j)
            key = (min(ri, rj), max(ri, rj))
            if best is None or key < best[0]:
                best = (key, i, j, vals[t])
        _, i, j, val = best
        if self.rep(j) < self.rep(i):
            i, j = j, i
        return i, j, float(val)

    def admit(self, s: int, words: list[str], row: dict, col: dict, nl: float, nr: float):
        """Place a new cluster in slot s; row/col map slots to bigram counts."""
        self.members[s] = list(words)
        self.nl[s], self.nr[s] = nl, nr
        self.N[s, :] = 0.0
        self.N[:, s] = 0.0
        for t, c in row.items():
            self.N[s, t] += c
        for t, c in col.items():
            if t != s:
                self.N[t, s] += c
        self.active[s] = True
        self.refresh_q(s)
        # existing pairs gain the new cluster as a third party
        self._apply(s, +1.0)
        self.set_losses(s)

    def merge(self, a: int, b: int):
        """Merge b into a; slot b becomes free."""
        self._apply(a, -1.0)
        self._apply(b, -1.0)
        N = self.N
        N[a, :] += N[b, :]
        N[:, a] += N[:, b]
        N[b, :] = 0.0
        N[:, b] = 0.0
        self.nl[a] += self.nl[b]
        self.nr[a] += self.nr[b]
        self.nl[b] = self.nr[b] = 0.0
        for M in (self.Q, self.Fr, self.Fc):
            M[b, :] = 0.0
            M[:, b] = 0.0
        self.active[b] = False
        self.members[a] = sorted(self.members[a] + self.members[b])
        self.members[b] = None
        self.refresh_q(a)
        self._apply(a, +1.0)
        self.L[b, :] = np.inf
        self.L[:, b] = np.inf
        self.set_losses(a)


def brown_cluster(corpus: TokenizedCorpus, num_clusters: int = DEFAULT_CLUSTERS,
                  min_count: int = DEFAULT_MIN_COUNT, build_tree: bool = True,
                  on_merge: Callable | None = None) -> ClusterMap:
    """Cluster the words of ``corpus`` occurring at least ``min_count`` times.

    ``on_merge(clusters, left, right, loss)`` is called before every merge
    with the active clusters (lists of words) and the two being merged; it
    exists so tests can audit each greedy decision.
    """
    if num_clusters < 1:
        raise ClusteringError("num_clusters must be >= 1")
    if len(corpus) == 0 or corpus.token_count == 0:
        raise ClusteringError("cannot cluster an empty corpus")
    counts = Counter(w for s in corpus.sentences for w in s)
    eligible = sorted((w for w, c in counts.items() if c >= min_count),
                      key=lambda w: (-counts[w], w))
    if len(eligible) < num_clusters:
        warnings.warn("only %d words reach min_count=%d; each gets its own cluster"
                      % (len(eligible), min_count), stacklevel=2)
    if not eligible:
        return ClusterMap({}, 0, counts=dict(counts))

    index = {w: i for i, w in enumerate(eligible)}
    out_edges: list[dict[int, int]] = [dict() for _ in eligible]
    in_edges: list[dict[int, int]] = [dict() for _ in eligible]
    total = 0
    for (a, b), c in bigram_counts(corpus).items():
        ia, ib = index.get(a), index.get(b)
        if ia is None or ib is None:
            continue
        out_edges[ia][ib] = out_edges[ia].get(ib, 0) + c
        in_edges[ib][ia] = in_edges[ib].get(ia, 0) + c
        total += c
    total = max(total, 1)

    C = min(num_clusters, len(eligible))
    win = _Window(C + 1, float(total))
    slot_of = np.full(len(eligible), -1)
    free = list(range(C + 1))
    tree: list[tuple[str, str]] = []
    merges = []

    def admit(i: int):
        s = free.pop(0)
        row, col = {}, {}
        for j, c in out_edges[i].items():
            t = s if j == i else slot_of[j]
            if t >= 0:
                row[t] = row.get(t, 0) + c
        for j, c in in_edges[i].items():
            t = s if j == i else slot_of[j]
            if t >= 0:
                col[t] = col.get(t, 0) + c
        slot_of[i] = s
        win.admit(s, [eligible[i]], row, col,
                  float(sum(out_edges[i].values())), float(sum(in_edges[i].values())))

    def merge_best():
        a, b, val = win.best_pair()
        left, right = win.members[a], win.members[b]
        if on_merge is not None:
            on_merge([list(win.members[s]) for s in win._act()], list(left), list(right), val / total)
        tree.append((win.rep(a), win.rep(b)))
        merges.append((win.rep(a), win.rep(b), val / total))
        for w in right:
            slot_of[index[w]] = a
        win.merge(a, b)
        free.append(b)
        free.sort()

    for i in range(C):
        admit(i)
    for i in range(C, len(eligible)):
        admit(i)
        merge_best()
        if (i - C) % 1000 == 999:
            log.info("brown: admitted %d/%d words", i + 1, len(eligible))

    final = {win.rep(s): list(win.members[s]) for s in win._act()}
    partition_merges = list(merges)
    if build_tree:
        while win.active.sum() > 1:
            merge_best()
    bits = _bit_strings(final, tree[len(partition_merges):])
    order = sorted(final, key=lambda r: (bits[r], r))
    assignment, bit_strings = {}, {}
    for cid, r in enumerate(order):
        for w in final[r]:
            assignment[w] = cid
            bit_strings[w] = bits[r]
    return ClusterMap(assignment, C, bit_strings, dict(counts), partition_merges)


def _bit_strings(final: dict[str, list[str]], tree: list[tuple[str, str]]) -> dict[str, str]:
    """Paths from the root to each final cluster; left child (smaller
    representative) is 0."""
    # every node is named by its representative (smallest word)
    node = {r: ("leaf", r) for r in final}
    for a, b in tree:
        merged = ("node", node[a], node[b])
        node[a] = merged
        del node[b]
    out: dict[str, str] = {}
    roots = sorted(node.items())
    if len(roots) == 1:
        stack = [(roots[0][1], "")]
    else:  # tree not built: flat list of leaves
        stack = [(n, format(i, "b")) for i, (_, n) in enumerate(roots)]
    while stack:
        n, path = stack.pop()
        if n[0] == "leaf":
            out[n[1]] = path or "0"
        else:
            stack.append((n[1], path + "0"))
            stack.append((n[2], path + "1"))
    return out
