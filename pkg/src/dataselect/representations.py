"""Discriminative re-representations of text.

Two transforms live here:

* the language-difference-model tags ``cluster/suffix``, where the suffix
  bins ln(P_task(w) / P_pool(w)) by whole powers of e;
* the reduced lexicon used by cynical selection, which collapses most of the
  vocabulary into a handful of labels.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .clustering import ClusterMap
from .corpus import TokenizedCorpus, VocabStats

SUFFIXES = ("---", "--", "-", "0", "+", "++", "+++")

USELESS = "__useless"
IMPOSSIBLE = "__impossible"
DUBIOUS = "__dubious"
BAD = "__bad"
BORING = "__boring"
LABELS = (USELESS, IMPOSSIBLE, DUBIOUS, BAD, BORING)

E = math.e


def _floor_log(x: float) -> int:
    # ln(e**k) can land a hair below k; snap so boundaries go to the upper bin
    y = math.log(x)
    k = round(y)
    if abs(y - k) < 1e-12:
        return int(k)
    return math.floor(y)


def bias_bin(ratio: float) -> int:
    """Clamped exponent bin in [-3, 3]; -1 and 0 share the neutral band."""
    if ratio == math.inf:
        return 3
    if not ratio > 0:
        raise ValueError("bias ratio must be positive, got %r" % (ratio,))
    k = _floor_log(ratio)
    if k >= 3:
        return 3
    if k <= -4:
        return -3
    if k in (-1, 0):
        return 0
    return k if k > 0 else k + 1


def bias_suffix(ratio: float) -> str:
    """Suffix for a task/pool probability ratio.

    ln(ratio) in [-1, 1) renders "0"; [1, 2) "+", [2, 3) "++", >= 3 "+++";
    [-2, -1) "-", [-3, -2) "--", < -3 "---".
    """
    return SUFFIXES[bias_bin(ratio) + 3]


def word_suffix(word: str, task: VocabStats, pool: VocabStats) -> str:
    ct, cp = task[word], pool[word]
    if ct == 0 and cp == 0:
        return "0"
    if ct == 0:
        return "---"
    if cp == 0:
        return "+++"
    return bias_suffix((ct / task.total) / (cp / pool.total))


@dataclass(frozen=True)
class DiscriminativeCorpus:
    tags: TokenizedCorpus
    original: TokenizedCorpus

    def __len__(self) -> int:
        return len(self.tags)

    @property
    def back_map(self) -> dict[int, tuple[str, ...]]:
        return dict(zip(self.original.line_index, self.original.sentences))

    def tag_vocab(self) -> set[str]:
        return self.tags.vocab()


def tag_table(clusters: ClusterMap, task: VocabStats, pool: VocabStats,
              words=None) -> dict[str, str]:
    words = set(task.counts) | set(pool.counts) if words is None else words
    return {w: "%s/%s" % (clusters.label(w), word_suffix(w, task, pool)) for w in words}


def transform_ldm(corpus: TokenizedCorpus, clusters: ClusterMap,
                  task_stats: VocabStats, pool_stats: VocabStats) -> DiscriminativeCorpus:
    table = tag_table(clusters, task_stats, pool_stats, corpus.vocab())
    tags = TokenizedCorpus(tuple(tuple(table[w] for w in s) for s in corpus.sentences),
                           corpus.line_index)
    return DiscriminativeCorpus(tags, corpus)


def restore_original(selection: Sequence[int], corpus: TokenizedCorpus) -> TokenizedCorpus:
    """Original sentences for ranked line indices, in ranked order."""
    pos = {li: i for i, li in enumerate(corpus.line_index)}
    out = []
    for li in selection:
        if li not in pos:
            raise IndexError("line index %d not in corpus" % li)
        out.append(pos[li])
    return corpus.subset(out)


@dataclass
class ReducedLexicon:
    mapping: dict[str, str]
    task_counts: dict[str, int] = field(default_factory=dict)
    pool_counts: dict[str, int] = field(default_factory=dict)

    @property
    def rule_counts(self) -> Counter:
        return Counter(lab if lab.startswith("__") else "identity"
                       for lab in (_base_label(v) for v in self.mapping.values()))

    def symbols(self) -> set[str]:
        return set(self.mapping.values())

    def reduce(self, sentence: Sequence[str]) -> tuple[str, ...]:
        m = self.mapping
        return tuple(m.get(w, USELESS) for w in sentence)

    def reduce_corpus(self, corpus: TokenizedCorpus) -> TokenizedCorpus:
        return TokenizedCorpus(tuple(self.reduce(s) for s in corpus.sentences), corpus.line_index)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for w in sorted(self.mapping):
                f.write("%s\t%s\t%d\t%d\n" % (w, self.mapping[w], self.task_counts.get(w, 0),
                                              self.pool_counts.get(w, 0)))

    @classmethod
    def load(cls, path) -> "ReducedLexicon":
        mapping, tc, pc = {}, {}, {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line:
                continue
            w, lab, ct, cp = line.split("\t")
            mapping[w], tc[w], pc[w] = lab, int(ct), int(cp)
        return cls(mapping, tc, pc)


def _base_label(label: str) -> str:
    for lab in LABELS:
        if label.startswith(lab):
            return lab
    return label


def reduce_vocab_cynical(task_stats: VocabStats, pool_stats: VocabStats,
                         bad_suffix: bool = False, split_boring: bool = False) -> ReducedLexicon:
    """First-match rule engine over the joint lexicon.

    Rules, in order: absent from task -> __useless; absent from pool ->
    __impossible; fewer than 3 occurrences in both -> __dubious; ratio below
    1/e -> __bad; ratio in [1/e, e) -> __boring; otherwise the word stays.
    ``bad_suffix`` appends the bias suffix to __bad; ``split_boring``
    subdivides __boring by the order of magnitude of the task count.
    """
    mapping = {}
    for w in sorted(set(task_stats.counts) | set(pool_stats.counts)):
        ct, cp = task_stats[w], pool_stats[w]
        if ct == 0:
            lab = USELESS
        elif cp == 0:
            lab = IMPOSSIBLE
        elif ct < 3 and cp < 3:
            lab = DUBIOUS
        else:
            lr = task_stats.log_ratio(pool_stats, w)
            if lr < -1:
                lab = BAD + (bias_suffix(math.exp(lr)) if bad_suffix else "")
            elif lr < 1:
                lab = BORING + ("_%d" % math.floor(math.log(ct)) if split_boring else "")
            else:
                lab = w
        mapping[w] = lab
    return ReducedLexicon(mapping, dict(task_stats.counts), dict(pool_stats.counts))
