"""Interpolated modified Kneser-Ney n-gram language models.

Conventions shared by training, scoring and ARPA export:

* every sentence is padded on the left with ``order - 1`` begin markers and
  scored through one end marker, so an L-token sentence has L + 1 scored
  positions;
* the lowest-order distribution is interpolated with a uniform distribution
  over ``max(padded_vocab_size, #types) + 2`` symbols (the word types, the end
  marker and the unknown symbol, plus phantom types that pad the vocabulary);
  an out-of-vocabulary token receives one uniform share, so padding makes
  unknown words cheaper to predict the way a larger vocabulary would;
* natural logarithms throughout; perplexity is ``exp`` of the per-position
  cross-entropy.

N-grams are stored as packed integers (``bits`` bits per word id) so that
order-6 models over a few hundred thousand sentences fit in memory.
"""
from __future__ import annotations

import logging
import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import TokenizedCorpus

log = logging.getLogger(__name__)

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
BOS_ID, EOS_ID, UNK_ID = 0, 1, 2

FALLBACK_DISCOUNT = 0.75

SELECTION_ORDER = 6
EVALUATION_ORDER = 4
DEFAULT_PAD = 1_500_000


class LMError(ValueError):
    pass


def kn_discounts(count_of_counts: Counter) -> tuple[float, float, float] | None:
    """Modified-KN discounts (D1, D2, D3+) from counts of counts.

    Returns None when the estimate is degenerate (a missing count-of-count
    or a non-positive discount).
    """
    n1, n2, n3, n4 = (count_of_counts.get(r, 0) for r in (1, 2, 3, 4))
    if min(n1, n2, n3, n4) == 0:
        return None
    y = n1 / (n1 + 2 * n2)
    d = (1 - 2 * y * n2 / n1, 2 - 3 * y * n3 / n2, 3 - 4 * y * n4 / n3)
    if any(x <= 0 for x in d):
        return None
    return d


@dataclass
class _Level:
    discounts: tuple[float, float, float]
    alpha: dict      # packed n-gram -> discounted mass (c - D(c)) / S(h)
    gamma: dict      # packed history -> interpolation weight
    fallback: bool = False


class NGramModel:
    """A trained model; immutable after construction."""

    def __init__(self, order: int, vocab: Iterable[str], padded_vocab_size: int,
                 levels: list[_Level] | None = None):
        self.order = order
        self.vocab = frozenset(vocab)
        self.padded_vocab_size = max(padded_vocab_size, len(self.vocab))
        self._words = [BOS, EOS, UNK] + sorted(self.vocab)
        self._ids = {w: i for i, w in enumerate(self._words)}
        self.bits = max(1, len(self._words).bit_length())
        self.levels = levels or []
        self.uniform = 1.0 / (self.padded_vocab_size + 2)

    @classmethod
    def uniform_model(cls, vocab: Iterable[str], padded_vocab_size: int = 0):
        """Order-1 model with no counts: every symbol gets 1 / (pad + 2)."""
        return cls(1, vocab, padded_vocab_size, levels=None)

    @property
    def discounts(self) -> list[tuple[float, float, float]]:
        return [lv.discounts for lv in self.levels]

    def word_id(self, w: str) -> int:
        return self._ids.get(w, UNK_ID)

    def _encode(self, sentence: Sequence[str]) -> list[int]:
        ids = self._ids
        return [BOS_ID] * (self.order - 1) + [ids.get(w, UNK_ID) for w in sentence] + [EOS_ID]

    def _prob_ids(self, context: Sequence[int], w: int, upto: int | None = None) -> float:
        # context holds the most recent ids, oldest first; only the last
        # (order - 1) matter.
        upto = min(upto or self.order, len(self.levels))
        b = self.bits
        p = self.uniform
        h = 0
        n = len(context)
        for k in range(1, upto + 1):
            if k > 1:
                if k - 1 > n:
                    break
                h |= context[n - k + 1] << (b * (k - 2))
            level = self.levels[k - 1]
            gam = level.gamma.get(h)
            if gam is None:
                break
            p = level.alpha.get((h << b) | w, 0.0) + gam * p
        return p

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        """P(word | history) for a single token; OOV words get one uniform share."""
        ctx = [self._ids.get(x, UNK_ID) for x in history][-(self.order - 1):] if self.order > 1 else []
        if word == BOS:
            return 0.0
        return self._prob_ids(ctx, self._ids.get(word, UNK_ID))

    def unk_mass(self, history: Sequence[str] = ()) -> float:
        """Total probability of everything outside vocab + end marker."""
        phantom = self.padded_vocab_size - len(self.vocab) + 1
        return phantom * self.prob(UNK, history)

    def distribution(self, history: Sequence[str] = ()) -> dict[str, float]:
        dist = {w: self.prob(w, history) for w in self.vocab}
        dist[EOS] = self.prob(EOS, history)
        dist[UNK] = self.unk_mass(history)
        return dist

    def histories(self, k: int) -> list[tuple[str, ...]]:
        """Decoded histories with observed continuations at order k."""
        return [self._unpack(h, k - 1) for h in self.levels[k - 1].gamma]

    def _unpack(self, key: int, length: int) -> tuple[str, ...]:
        mask = (1 << self.bits) - 1
        out = []
        for _ in range(length):
            out.append(self._words[key & mask])
            key >>= self.bits
        return tuple(reversed(out))

    def sentence_logprob(self, sentence: Sequence[str]) -> tuple[float, int]:
        """(sum of ln P over scored positions, number of positions)."""
        ids = self._encode(sentence)
        total = 0.0
        start = self.order - 1
        for i in range(start, len(ids)):
            total += math.log(self._prob_ids(ids[i - start:i], ids[i]))
        return total, len(ids) - start


def _count_ngrams(corpus: TokenizedCorpus, order: int, ids: dict, bits: int) -> Counter:
    mask = (1 << (bits * order)) - 1
    counts = Counter()
    for s in corpus.sentences:
        key = 0  # order-1 leading begin markers pack to zero
        for w in s:
            key = ((key << bits) | ids[w]) & mask
            counts[key] += 1
        key = ((key << bits) | EOS_ID) & mask
        counts[key] += 1
    return counts


def _build_level(counts: dict, bits: int, k: int) -> _Level:
    coc = Counter(counts.values())
    d = kn_discounts(coc)
    fallback = d is None
    if fallback:
        warnings.warn("degenerate counts of counts at order %d; using fixed discount %.2f"
                      % (k, FALLBACK_DISCOUNT), stacklevel=3)
        d = (FALLBACK_DISCOUNT,) * 3
    total = defaultdict(int)
    disc_mass = defaultdict(float)
    for key, c in counts.items():
        h = key >> bits
        total[h] += c
        disc_mass[h] += d[min(c, 3) - 1]
    alpha = {}
    for key, c in counts.items():
        alpha[key] = (c - d[min(c, 3) - 1]) / total[key >> bits]
    gamma = {h: disc_mass[h] / total[h] for h in total}
    return _Level(d, alpha, gamma, fallback)


def train_kn(corpus: TokenizedCorpus, order: int = SELECTION_ORDER,
             padded_vocab_size: int = DEFAULT_PAD) -> NGramModel:
    if order < 1:
        raise LMError("order must be >= 1, got %d" % order)
    if len(corpus) == 0:
        raise LMError("cannot train a language model on an empty corpus")
    vocab = corpus.vocab()
    if padded_vocab_size < len(vocab):
        warnings.warn("padded vocabulary size %d below observed type count %d; clamping"
                      % (padded_vocab_size, len(vocab)), stacklevel=2)
    model = NGramModel(order, vocab, padded_vocab_size)
    bits = model.bits
    top = _count_ngrams(corpus, order, model._ids, bits)
    counts = [None] * order
    counts[order - 1] = top
    for k in range(order - 1, 0, -1):
        # continuation counts: number of distinct left extensions
        mask = (1 << (bits * k)) - 1
        counts[k - 1] = Counter(key & mask for key in counts[k])
    levels = [_build_level(counts[k - 1], bits, k) for k in range(1, order + 1)]
    model.levels = levels
    return model


def sentence_cross_entropy(model: NGramModel, sentence: Sequence[str]) -> float:
    total, n = model.sentence_logprob(sentence)
    return -total / n


def corpus_perplexity(model: NGramModel, corpus: TokenizedCorpus) -> float:
    if len(corpus) == 0:
        raise LMError("perplexity of an empty corpus is undefined")
    total, n = 0.0, 0
    for s in corpus.sentences:
        lp, m = model.sentence_logprob(s)
        total += lp
        n += m
    return math.exp(-total / n)


def oov_tokens(model_vocab, corpus: TokenizedCorpus) -> int:
    vocab = model_vocab.vocab if isinstance(model_vocab, NGramModel) else model_vocab
    return sum(1 for s in corpus.sentences for w in s if w not in vocab)
