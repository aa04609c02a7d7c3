"""Seeded two-domain Zipfian corpora for desk-scale experiments.

Three word inventories: shared function words, task-domain content words and
general content words.  The task generator draws mostly task content, the
general generator mostly general content, with a little leakage each way so
the vocabularies partially overlap.  Sentence lengths are negative-binomial
(gamma-Poisson), which gives the long right tail real corpora have.

The pool mixes an in-domain-like source (15% of sentences) with a general
source; average lengths come out near 19 tokens for the task and 14 for the
pool.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import ParallelCorpus, TokenizedCorpus


@dataclass
class SyntheticConfig:
    seed: int = 1234
    task_sentences: int = 2000
    pool_sentences: int = 50_000
    function_words: int = 150
    task_words: int = 6000
    general_words: int = 40_000
    zipf_exponent: float = 1.05
    # token mixtures (function, task content, general content)
    task_mix: tuple[float, float, float] = (0.40, 0.55, 0.05)
    general_mix: tuple[float, float, float] = (0.40, 0.03, 0.57)
    task_len: float = 19.0
    pool_in_domain_share: float = 0.15
    pool_in_domain_len: float = 14.0
    pool_general_len: float = 14.0
    length_shape: float = 2.0


class _Lexicon:
    def __init__(self, prefix: str, size: int, exponent: float):
        self.words = np.array(["%s%d" % (prefix, i) for i in range(size)])
        w = 1.0 / np.arange(1, size + 1) ** exponent
        self.probs = w / w.sum()


def _lengths(rng, n, mean, shape):
    lam = rng.gamma(shape, mean / shape, size=n)
    return np.maximum(1, rng.poisson(lam))


def _sentences(rng, n, mean_len, shape, mix, lexicons):
    lens = _lengths(rng, n, mean_len, shape)
    total = int(lens.sum())
    source = rng.choice(3, size=total, p=mix)
    tokens = np.empty(total, dtype=object)
    for k, lex in enumerate(lexicons):
        where = np.flatnonzero(source == k)
        tokens[where] = rng.choice(lex.words, size=len(where), p=lex.probs)
    out, pos = [], 0
    for L in lens:
        out.append(tuple(tokens[pos:pos + L].tolist()))
        pos += L
    return out


def make_corpora(cfg: SyntheticConfig | None = None) -> tuple[TokenizedCorpus, TokenizedCorpus]:
    """(task, pool) for the given configuration; deterministic in cfg.seed."""
    cfg = cfg or SyntheticConfig()
    rng = np.random.default_rng(cfg.seed)
    lexicons = (_Lexicon("f", cfg.function_words, cfg.zipf_exponent),
                _Lexicon("t", cfg.task_words, cfg.zipf_exponent),
                _Lexicon("g", cfg.general_words, cfg.zipf_exponent))
    task = _sentences(rng, cfg.task_sentences, cfg.task_len, cfg.length_shape,
                      cfg.task_mix, lexicons)
    n_in = int(round(cfg.pool_sentences * cfg.pool_in_domain_share))
    pool_in = _sentences(rng, n_in, cfg.pool_in_domain_len, cfg.length_shape,
                         cfg.task_mix, lexicons)
    pool_gen = _sentences(rng, cfg.pool_sentences - n_in, cfg.pool_general_len,
                          cfg.length_shape, cfg.general_mix, lexicons)
    pool = pool_in + pool_gen
    order = rng.permutation(len(pool))
    return TokenizedCorpus(tuple(task)), TokenizedCorpus(tuple(pool[i] for i in order))


def _translate(rng, corpus: TokenizedCorpus, noise: float, lexicons) -> TokenizedCorpus:
    """A noisy word-by-word 'translation': each token maps to a fixed target
    token, with occasional dropped tokens and inserted function words."""
    out = []
    fw = lexicons[0]
    for s in corpus.sentences:
        tgt = []
        for w in s:
            u = rng.random()
            if u < noise / 2:
                continue
            if u < noise:
                tgt.append("x" + str(rng.choice(fw.words, p=fw.probs)))
            tgt.append("x" + w)
        out.append(tuple(tgt))
    return TokenizedCorpus(tuple(out))


def make_parallel(cfg: SyntheticConfig | None = None, noise: float = 0.1):
    """(task, pool) as ParallelCorpus pairs; the source sides equal make_corpora()."""
    cfg = cfg or SyntheticConfig()
    task, pool = make_corpora(cfg)
    rng = np.random.default_rng(cfg.seed + 1)
    lexicons = (_Lexicon("f", cfg.function_words, cfg.zipf_exponent),)
    return (ParallelCorpus(task, _translate(rng, task, noise, lexicons)),
            ParallelCorpus(pool, _translate(rng, pool, noise, lexicons)))
