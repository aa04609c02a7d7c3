import random

import pytest
from hypothesis import given, strategies as st

from dataselect.corpus import ParallelCorpus, TokenizedCorpus
from dataselect.lm import train_kn
from dataselect.selection_ml import (RankedSelection, SentenceScore, load_scores,
                                     rank_and_select, save_scores, score_bilingual,
                                     score_moore_lewis)
from oracles import BruteKN


def lines(seed, n, words, max_len=7):
    rng = random.Random(seed)
    return [" ".join(rng.choices(words, k=rng.randint(1, max_len))) for _ in range(n)]


TASK = TokenizedCorpus.from_lines(lines(0, 30, list("abcde")))
POOL = TokenizedCorpus.from_lines(lines(1, 60, list("abcdefghij")))


def test_identical_models_score_zero():
    lm = train_kn(POOL, 3, 100)
    scores = score_moore_lewis(lm, lm, POOL)
    assert all(abs(s.score) <= 1e-9 for s in scores)


def test_scores_match_oracle_difference():
    task_lm, pool_lm = train_kn(TASK, 3, 50), train_kn(POOL, 3, 50)
    t = BruteKN([s for s in TASK.sentences], 3, 50)
    p = BruteKN([s for s in POOL.sentences], 3, 50)
    for s, sc in zip(POOL.sentences, score_moore_lewis(task_lm, pool_lm, POOL)):
        assert sc.score == pytest.approx(t.cross_entropy(s) - p.cross_entropy(s), abs=1e-9)


def test_bilingual_is_sum_of_sides():
    tgt_task = TokenizedCorpus.from_lines(lines(2, 30, list("vwxyz")))
    tgt_pool = TokenizedCorpus.from_lines(lines(3, 60, list("qrstuvwxyz")))
    src_models = (train_kn(TASK, 3, 50), train_kn(POOL, 3, 50))
    tgt_models = (train_kn(tgt_task, 3, 50), train_kn(tgt_pool, 3, 50))
    bi = score_bilingual([src_models[0], tgt_models[0]], [src_models[1], tgt_models[1]],
                         ParallelCorpus(POOL, tgt_pool))
    a = score_moore_lewis(*src_models, POOL)
    b = score_moore_lewis(*tgt_models, tgt_pool)
    for x, y, z in zip(bi, a, b):
        assert x.score == pytest.approx(y.score + z.score, abs=1e-12)


def test_in_domain_sentences_rank_first():
    task_lm, pool_lm = train_kn(TASK, 3, 50), train_kn(POOL, 3, 50)
    ranked = rank_and_select(score_moore_lewis(task_lm, pool_lm, POOL))
    top = [POOL.sentences[li] for li in ranked.line_indices[:10]]
    assert all(set(s) <= set("abcde") for s in top)


scores = st.lists(st.floats(min_value=-5, max_value=5, allow_nan=False), max_size=30)


@given(scores, st.integers(0, 30), st.integers(0, 30))
def test_ranking_is_sorted_and_prefix_nested(vals, n1, n2):
    ss = [SentenceScore(i, v) for i, v in enumerate(vals)]
    full = rank_and_select(ss)
    keys = [(sc, li) for _, li, sc in full.entries]
    assert keys == sorted(keys)
    a, b = sorted((n1, n2))
    assert rank_and_select(ss, a).entries == rank_and_select(ss, b).entries[:a]
    assert full.prefix(a).entries == full.entries[:a]


def test_ties_break_on_line_index():
    r = rank_and_select([SentenceScore(5, 0.0), SentenceScore(2, 0.0), SentenceScore(9, -1.0)])
    assert r.line_indices == [9, 2, 5]
    with pytest.raises(ValueError):
        rank_and_select([], -1)


def test_file_roundtrips(tmp_path):
    ss = [SentenceScore(3, -0.1), SentenceScore(0, 1 / 3)]
    save_scores(ss, tmp_path / "s.tsv")
    assert load_scores(tmp_path / "s.tsv") == ss
    r = rank_and_select(ss, method_tag="ml-mono")
    r.save(tmp_path / "r.tsv")
    assert RankedSelection.load(tmp_path / "r.tsv", "ml-mono") == r


def test_documented_ranking_examples():
    ss = [SentenceScore(0, 2.0), SentenceScore(1, 1.0)]
    assert rank_and_select(ss, 1).line_indices == [1]
    assert rank_and_select(ss, 10).line_indices == [1, 0]


@given(st.lists(st.integers(-50, 50), max_size=30), st.integers(-1000, 1000))
def test_constant_shift_keeps_ranking(vals, c):
    # integer-valued scores make the shift exact in floating point
    ss = [SentenceScore(i, float(v)) for i, v in enumerate(vals)]
    shifted = [SentenceScore(s.line_index, s.score + c) for s in ss]
    assert rank_and_select(ss).line_indices == rank_and_select(shifted).line_indices


def test_task_sentence_scores_below_pool_median():
    from dataselect.synthetic import SyntheticConfig, make_corpora
    task, pool = make_corpora(SyntheticConfig(seed=2, task_sentences=300, pool_sentences=2000))
    task_lm, pool_lm = train_kn(task, 4, 100_000), train_kn(pool, 4, 100_000)
    pool_scores = sorted(s.score for s in score_moore_lewis(task_lm, pool_lm, pool))
    median = pool_scores[len(pool_scores) // 2]
    copied = TokenizedCorpus((task.sentences[0],))
    assert score_moore_lewis(task_lm, pool_lm, copied)[0].score < median


def test_identical_models_per_side_score_zero_bilingually():
    tgt = TokenizedCorpus.from_lines(lines(7, 60, list("vwxyz")))
    a, b = train_kn(POOL, 3, 50), train_kn(tgt, 3, 50)
    bi = score_bilingual([a, b], [a, b], ParallelCorpus(POOL, tgt))
    assert all(abs(s.score) <= 1e-9 for s in bi)
