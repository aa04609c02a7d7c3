"""ARPA backoff-format export and import.

An interpolated KN model converts exactly to backoff form: every n-gram with
a nonzero count at its order is listed with its interpolated probability, and
every history carries its interpolation weight as the backoff weight.
Histories that are never predicted themselves (runs of begin markers) are
listed with log-probability -99 so their backoff weights have a home.

The exported file follows this package's padding convention: scoring an
L-token sentence prepends ``order - 1`` begin markers.
"""
from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Sequence

from .lm import BOS, EOS, UNK, BOS_ID, NGramModel

LOG_ZERO = -99.0


def _fmt(x: float) -> str:
    return format(x, ".12g")


def write_arpa(model: NGramModel, path) -> None:
    b = model.bits
    entries = [dict() for _ in range(model.order)]  # tuple -> [logprob, backoff]
    for k in range(1, len(model.levels) + 1):
        level = model.levels[k - 1]
        for key in level.alpha:
            ngram_ids = _unpack_ids(key, k, b)
            p = model._prob_ids(ngram_ids[:-1], ngram_ids[-1], upto=k)
            entries[k - 1][ngram_ids] = [math.log10(p), None]
    # the unknown symbol and the unigram of every vocabulary word
    for w in list(model.vocab) + [EOS, UNK]:
        wid = model.word_id(w)
        if (wid,) not in entries[0]:
            entries[0][(wid,)] = [math.log10(model._prob_ids((), wid, upto=1)), None]
    for k in range(2, len(model.levels) + 1):
        for h, g in model.levels[k - 1].gamma.items():
            hist = _unpack_ids(h, k - 1, b)
            row = entries[k - 2].setdefault(hist, [LOG_ZERO, None])
            row[1] = math.log10(g)
    if (BOS_ID,) not in entries[0]:
        entries[0][(BOS_ID,)] = [LOG_ZERO, None]

    words = model._words
    lines = ["\\data\\"]
    for k, tab in enumerate(entries, 1):
        lines.append("ngram %d=%d" % (k, len(tab)))
    for k, tab in enumerate(entries, 1):
        lines.append("")
        lines.append("\\%d-grams:" % k)
        rows = sorted((tuple(words[i] for i in ids), lp, bo) for ids, (lp, bo) in tab.items())
        for toks, lp, bo in rows:
            line = _fmt(lp) + "\t" + " ".join(toks)
            if bo is not None:
                line += "\t" + _fmt(bo)
            lines.append(line)
    lines.append("")
    lines.append("\\end\\")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _unpack_ids(key: int, length: int, bits: int) -> tuple[int, ...]:
    mask = (1 << bits) - 1
    out = []
    for _ in range(length):
        out.append(key & mask)
        key >>= bits
    return tuple(reversed(out))


class ArpaModel:
    """Backoff scorer over an ARPA file; natural-log results."""

    def __init__(self, order: int, probs: dict, backoffs: dict):
        self.order = order
        self.probs = probs        # tuple -> log10 prob
        self.backoffs = backoffs  # tuple -> log10 backoff
        self.vocab = {ng[0] for ng in probs if len(ng) == 1} - {BOS, EOS, UNK}

    def log10_prob(self, word: str, history: Sequence[str]) -> float:
        if word not in self.vocab and word != EOS:
            word = UNK
        history = tuple(w if w in self.vocab or w in (BOS, EOS) else UNK for w in history)
        history = history[-(self.order - 1):] if self.order > 1 else ()
        bo = 0.0
        while True:
            ng = history + (word,)
            if ng in self.probs:
                return bo + self.probs[ng]
            if not history:
                return bo + LOG_ZERO
            bo += self.backoffs.get(history, 0.0)
            history = history[1:]

    def sentence_logprob(self, sentence: Sequence[str]) -> tuple[float, int]:
        toks = [BOS] * (self.order - 1) + list(sentence) + [EOS]
        start = self.order - 1
        total = 0.0
        for i in range(start, len(toks)):
            total += self.log10_prob(toks[i], toks[i - start:i]) * math.log(10)
        return total, len(toks) - start


_NGRAM_HEADER = re.compile(r"^\\(\d+)-grams:$")


def read_arpa(path) -> ArpaModel:
    probs, backoffs = {}, {}
    order = 0
    section = None
    with open(path, encoding="utf-8") as f:
        for raw in f:
            line = raw.strip()
            if not line:
                continue
            if line == "\\data\\":
                section = "data"
                continue
            if line == "\\end\\":
                break
            m = _NGRAM_HEADER.match(line)
            if m:
                section = int(m.group(1))
                order = max(order, section)
                continue
            if section == "data":
                if line.startswith("ngram "):
                    order = max(order, int(line[6:].split("=")[0]))
                continue
            if isinstance(section, int):
                parts = line.split("\t")
                if len(parts) == 1:
                    parts = line.split()
                    lp, toks = parts[0], parts[1:1 + section]
                    bo = parts[1 + section] if len(parts) > 1 + section else None
                else:
                    lp, toks = parts[0], parts[1].split(" ")
                    bo = parts[2] if len(parts) > 2 else None
                ng = tuple(toks)
                probs[ng] = float(lp)
                if bo is not None:
                    backoffs[ng] = float(bo)
    if order == 0:
        raise ValueError("%s: no n-gram sections found" % path)
    return ArpaModel(order, probs, backoffs)
