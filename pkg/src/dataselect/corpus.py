"""Loading, indexing and counting of pre-tokenized corpora.

Input files hold one sentence per line, tokens separated by single spaces.
No tokenization or normalization happens here; tokens are opaque strings.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class CorpusError(ValueError):
    pass


Sentence = tuple[str, ...]


def split_line(line: str) -> Sentence:
    if not line:
        return ()
    return tuple(tok for tok in line.split(" ") if tok)


@dataclass(frozen=True)
class TokenizedCorpus:
    sentences: tuple[Sentence, ...]
    line_index: tuple[int, ...] = ()
    token_count: int = field(init=False)
    type_count: int = field(init=False)

    def __post_init__(self):
        sentences = tuple(tuple(s) for s in self.sentences)
        object.__setattr__(self, "sentences", sentences)
        if not self.line_index:
            object.__setattr__(self, "line_index", tuple(range(len(sentences))))
        elif len(self.line_index) != len(sentences):
            raise CorpusError("line_index length %d does not match %d sentences"
                              % (len(self.line_index), len(sentences)))
        object.__setattr__(self, "token_count", sum(len(s) for s in sentences))
        object.__setattr__(self, "type_count",
                           len({tok for s in sentences for tok in s}))

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "TokenizedCorpus":
        return cls(tuple(split_line(line) for line in lines))

    def __len__(self) -> int:
        return len(self.sentences)

    def __getitem__(self, i: int) -> Sentence:
        return self.sentences[i]

    def __iter__(self):
        return iter(self.sentences)

    def vocab(self) -> set[str]:
        return {tok for s in self.sentences for tok in s}

    def subset(self, indices: Sequence[int]) -> "TokenizedCorpus":
        """Sentences at the given positions, in the given order.

        The result keeps the original line indices of the picked sentences.
        """
        n = len(self.sentences)
        for i in indices:
            if not 0 <= i < n:
                raise IndexError("sentence index %d out of range [0, %d)" % (i, n))
        return TokenizedCorpus(tuple(self.sentences[i] for i in indices),
                               tuple(self.line_index[i] for i in indices))

    def concat(self, other: "TokenizedCorpus") -> "TokenizedCorpus":
        return TokenizedCorpus(self.sentences + other.sentences)

    def to_text(self) -> str:
        if not self.sentences:
            return ""
        return "\n".join(" ".join(s) for s in self.sentences) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


@dataclass(frozen=True)
class ParallelCorpus:
    source: TokenizedCorpus
    target: TokenizedCorpus

    def __post_init__(self):
        if len(self.source) != len(self.target):
            raise CorpusError("parallel corpus length mismatch: %d vs %d"
                              % (len(self.source), len(self.target)))

    def __len__(self) -> int:
        return len(self.source)

    def pairs(self):
        return zip(self.source.sentences, self.target.sentences)


@dataclass(frozen=True)
class VocabStats:
    counts: Counter
    total: int

    def prob(self, token: str) -> float:
        if self.total == 0:
            raise ZeroDivisionError("probabilities undefined for an empty corpus")
        return self.counts.get(token, 0) / self.total

    @property
    def probs(self) -> dict[str, float]:
        if self.total == 0:
            return {}
        return {tok: c / self.total for tok, c in self.counts.items()}

    def __getitem__(self, token: str) -> int:
        return self.counts.get(token, 0)

    def __add__(self, other: "VocabStats") -> "VocabStats":
        return VocabStats(self.counts + other.counts, self.total + other.total)

    def log_ratio(self, other: "VocabStats", token: str) -> float:
        """ln(P_self(token) / P_other(token)); +/-inf when one side is zero."""
        a, b = self[token], other[token]
        if a == 0 and b == 0:
            return 0.0
        if a == 0:
            return -math.inf
        if b == 0:
            return math.inf
        return math.log(a) - math.log(self.total) - math.log(b) + math.log(other.total)


def _decode_lines(data: bytes, path) -> list[str]:
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    out = []
    for lineno, raw in enumerate(lines, 1):
        try:
            out.append(raw.decode("utf-8"))
        except UnicodeDecodeError as e:
            raise CorpusError("%s:%d: invalid UTF-8 (%s)" % (path, lineno, e.reason)) from None
    return out


def load_corpus(path) -> TokenizedCorpus:
    data = Path(path).read_bytes()
    return TokenizedCorpus.from_lines(_decode_lines(data, path))


def load_parallel(src, tgt) -> ParallelCorpus:
    source, target = load_corpus(src), load_corpus(tgt)
    if len(source) != len(target):
        raise CorpusError("parallel corpus length mismatch: %s has %d lines, %s has %d"
                          % (src, len(source), tgt, len(target)))
    return ParallelCorpus(source, target)


def count_vocab(corpus: TokenizedCorpus) -> VocabStats:
    counts = Counter()
    for s in corpus.sentences:
        counts.update(s)
    return VocabStats(counts, corpus.token_count)
