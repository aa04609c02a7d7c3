import math
import random
from collections import Counter

import numpy as np
import pytest

from dataselect.corpus import TokenizedCorpus, count_vocab
from dataselect.cynical import (CynicalError, CynicalSelection, CynicalSelector, CynicalState,
                                batch_size, cynical_select)
from dataselect.representations import ReducedLexicon, reduce_vocab_cynical
from oracles import exhaustive_cynical, unigram_cross_entropy


def symbol_corpus(seed, n, symbols, max_len=6, min_len=1):
    rng = random.Random(seed)
    return TokenizedCorpus.from_lines(
        " ".join(rng.choices(symbols, k=rng.randint(min_len, max_len))) for _ in range(n))


TASK = symbol_corpus(0, 20, list("aabbbcd"))
POOL = symbol_corpus(1, 60, list("abcdefg"))


def identity(task, pool):
    words = task.vocab() | pool.vocab()
    return ReducedLexicon({w: w for w in words})


def test_batch_size():
    assert [batch_size(k) for k in (1, 2, 3, 7, 8, 20, 21)] == [1, 1, 1, 1, 2, 2, 3]
    with pytest.raises(ValueError):
        batch_size(0)


def test_matches_exhaustive_oracle():
    sel, state = cynical_select(TASK, POOL, identity(TASK, POOL), 40)
    trace = exhaustive_cynical(list(TASK.sentences), list(POOL.sentences), 40)
    assert sel.line_indices == [t[0] for t in trace]
    assert list(sel.words) == [t[1] for t in trace]
    for h, (_, _, ho) in zip(_running_entropy(sel), trace):
        assert h == pytest.approx(ho, abs=1e-9)


def _running_entropy(sel):
    h0 = CynicalSelector(TASK, POOL).state.H_cur
    out = []
    for _, _, d in sel.entries:
        h0 += d
        out.append(h0)
    return out


def test_incremental_entropy_matches_scratch():
    s = CynicalSelector(TASK, POOL, delta=0.5)
    task_counts = {v: 0 for v in s.state.symbols}
    for sent in TASK.sentences:
        for v in sent:
            task_counts[v] += 1
    task_counts = {v: c for v, c in task_counts.items() if c}
    while s.step():
        sel = dict(zip(s.state.symbols, s.state.sel_counts))
        assert s.state.H_cur == pytest.approx(unigram_cross_entropy(task_counts, sel), abs=1e-9)
        assert s.state.W_sel == pytest.approx(sum(sel.values()))


def test_word_gain_formula():
    s = CynicalSelector(TASK, POOL)
    st = s.state
    i = st.symbols.index("b")
    expect = math.log(1 + 1 / st.W_sel) - st.task_dist[i] * math.log(1 + 1 / st.sel_counts[i])
    assert s.word_gain("b") == pytest.approx(expect, abs=1e-15)
    assert s.word_gain("g") == pytest.approx(math.log(1 + 1 / st.W_sel))
    with pytest.raises(CynicalError):
        s.word_gain("nope")


def test_sentence_delta_vectorized_agrees():
    s = CynicalSelector(TASK, POOL)
    rows = list(range(len(POOL)))
    vec = s.sentence_deltas(np.array(rows))
    for r in rows:
        assert vec[r] == pytest.approx(s.sentence_delta(POOL.sentences[r]), abs=1e-12)


def test_batch_scores_are_exact_deltas_and_cover_pool():
    sel, state = cynical_select(TASK, POOL, identity(TASK, POOL), len(POOL), batch=True)
    assert sorted(sel.line_indices) == list(range(len(POOL)))
    assert state.H_cur == pytest.approx(state.recompute_entropy(), abs=1e-9)
    assert state.H_cur == pytest.approx(
        CynicalSelector(TASK, POOL).state.H_cur + sum(state.scores), abs=1e-9)


def test_budget_limits_and_errors():
    lex = identity(TASK, POOL)
    sel, _ = cynical_select(TASK, POOL, lex, 7, batch=True)
    assert len(sel) == 7
    assert len(cynical_select(TASK, POOL, lex, 0)[0]) == 0
    with pytest.raises(CynicalError):
        cynical_select(TASK, POOL, lex, len(POOL) + 1)
    with pytest.raises(CynicalError):
        cynical_select(TASK, POOL, lex, -1)
    with pytest.raises(CynicalError):
        cynical_select(TASK, POOL, ReducedLexicon({}), 1)


def test_empty_sentences_come_last_with_zero_delta():
    pool = TokenizedCorpus.from_lines(["a b", "", "c", ""])
    sel, state = cynical_select(TASK, pool, identity(TASK, pool), 4)
    assert sel.line_indices == [0, 2, 1, 3]
    assert [e[2] for e in sel.entries][2:] == [0.0, 0.0]
    assert state.H_cur == pytest.approx(state.recompute_entropy(), abs=1e-12)
    trace = exhaustive_cynical(list(TASK.sentences), list(pool.sentences), 4)
    assert sel.line_indices == [t[0] for t in trace]
    batch, _ = cynical_select(TASK, pool, identity(TASK, pool), 4, batch=True)
    assert sorted(batch.line_indices) == [0, 1, 2, 3]


def test_output_size_is_min_of_budget_and_pool():
    pool = TokenizedCorpus.from_lines(["a", "", "b c", "d", ""])
    lex = identity(TASK, pool)
    for budget in range(len(pool) + 1):
        for batch in (False, True):
            sel, _ = cynical_select(TASK, pool, lex, budget, batch=batch)
            assert len(sel) == budget
            assert len(set(sel.line_indices)) == budget


def test_documented_delta_cases():
    s = CynicalSelector(TASK, POOL)
    W = s.state.W_sel
    assert s.sentence_delta(()) == 0.0
    assert s.sentence_delta(("g",) * 5) == pytest.approx(math.log((W + 5) / W), abs=1e-15)
    assert s.word_gain("g") == pytest.approx(math.log((W + 1) / W), abs=1e-15)
    assert batch_size(100) == 4


def test_sentence_delta_equals_counterfactual_entropy_difference():
    s = CynicalSelector(TASK, POOL)
    for _ in range(5):
        s.step()
    st = s.state
    task_counts = Counter(v for x in TASK.sentences for v in x)
    before = dict(zip(st.symbols, st.sel_counts))
    for sent in POOL.sentences[:20]:
        after = dict(before)
        for v in sent:
            after[v] += 1
        expect = unigram_cross_entropy(task_counts, after) - unigram_cross_entropy(task_counts, before)
        assert s.sentence_delta(sent) == pytest.approx(expect, abs=1e-12)


def test_best_word_maximizes_weighted_gain():
    s = CynicalSelector(TASK, POOL)
    for _ in range(3):
        s.step()
    st = s.state
    v = s.best_word()
    score = st.task_dist * np.log1p(1 / st.sel_counts)
    avail = np.flatnonzero(s.available > 0)
    assert score[v] == pytest.approx(score[avail].max())


def test_greedy_pick_is_best_sentence_with_word():
    s = CynicalSelector(TASK, POOL)
    for _ in range(10):
        v = s.best_word()
        word = s.state.symbols[v]
        cands = [i for i, sent in enumerate(POOL.sentences) if word in sent and not s.picked_mask[i]]
        deltas = {i: s.sentence_delta(POOL.sentences[i]) for i in cands}
        (li,) = s.step()
        assert deltas[li] <= min(deltas.values()) + 1e-12


def test_single_sentence_pool_equal_to_task():
    one = TokenizedCorpus.from_lines(["a b a c"])
    sel, state = cynical_select(one, one, identity(one, one), 1)
    assert sel.line_indices == [0]
    counts = {"a": 3, "b": 2, "c": 2}        # add-one smoothed
    expect = sum(p * math.log(7 / counts[v]) for v, p in (("a", .5), ("b", .25), ("c", .25)))
    assert state.H_cur == pytest.approx(expect, abs=1e-12)


def test_resume_equals_uninterrupted(tmp_path):
    lex = identity(TASK, POOL)
    full, _ = cynical_select(TASK, POOL, lex, 30)
    _, half = cynical_select(TASK, POOL, lex, 12)
    half.save(tmp_path / "state.json")
    resumed, state = cynical_select(TASK, POOL, lex, 30, resume=CynicalState.load(tmp_path / "state.json"))
    assert resumed.line_indices == full.line_indices
    assert [e[2] for e in resumed.entries] == pytest.approx([e[2] for e in full.entries], abs=1e-12)
    other = symbol_corpus(9, 5, list("xyz"))
    with pytest.raises(CynicalError):
        cynical_select(other, other, identity(other, other), 2, resume=state)


def test_selection_file_roundtrip(tmp_path):
    sel, _ = cynical_select(TASK, POOL, identity(TASK, POOL), 10)
    sel.save(tmp_path / "c.tsv")
    assert CynicalSelection.load(tmp_path / "c.tsv") == sel


def test_reduced_lexicon_prefers_task_like_sentences():
    task = symbol_corpus(3, 50, ["t%d" % i for i in range(10)] + ["f"] * 5, 10, 4)
    general = symbol_corpus(4, 200, ["g%d" % i for i in range(30)] + ["f"] * 5, 10, 4)
    inside = symbol_corpus(5, 20, ["t%d" % i for i in range(10)] + ["f"] * 5, 10, 4)
    pool = general.concat(inside)
    lex = reduce_vocab_cynical(count_vocab(task), count_vocab(pool))
    sel, _ = cynical_select(task, pool, lex, 20)
    assert sum(li >= 200 for li in sel.line_indices) >= 15
