import math
import random

import pytest

from dataselect.corpus import CorpusError, TokenizedCorpus
from dataselect.evaluation import (CurvePoint, evaluate_prefixes, evaluate_subset, length_stats,
                                   load_curve, oov_curve, save_curve)
from dataselect.lm import corpus_perplexity, oov_tokens, train_kn
from dataselect.selection_ml import RankedSelection


def corpus(seed, n, words):
    rng = random.Random(seed)
    return TokenizedCorpus.from_lines(
        " ".join(rng.choices(words, k=rng.randint(1, 8))) for _ in range(n))


TASK = corpus(0, 25, list("abcdefg"))
POOL = corpus(1, 80, list("abcdefghijklmn"))
RANK = RankedSelection(tuple((r, li, 0.0) for r, li in enumerate(reversed(range(len(POOL))))))


def test_length_stats():
    assert length_stats(TokenizedCorpus.from_lines(["a b", "c d e f"])) == 3.0
    with pytest.raises(CorpusError):
        length_stats(TokenizedCorpus.from_lines([]))


def test_full_prefix_equals_pool_model():
    pts = evaluate_prefixes(RANK, POOL, TASK, [10, len(POOL)], lm_order=3, pad=200)
    lm = train_kn(POOL, 3, 200)
    assert pts[-1].perplexity == pytest.approx(corpus_perplexity(lm, TASK), rel=1e-9)
    assert pts[-1].oov_tokens == oov_tokens(lm.vocab, TASK)
    assert pts[-1].avg_sentence_length == pytest.approx(POOL.token_count / len(POOL))


def test_prefix_uses_ranked_sentences():
    p = evaluate_prefixes(RANK, POOL, TASK, [5], lm_order=2, pad=100)[0]
    sub = POOL.subset(list(reversed(range(len(POOL))))[:5])
    assert p == evaluate_subset(sub, TASK, 2, 100)


def test_threads_do_not_change_results():
    sizes = [5, 20, 40]
    assert (evaluate_prefixes(RANK, POOL, TASK, sizes, 3, 200, threads=2)
            == evaluate_prefixes(RANK, POOL, TASK, sizes, 3, 200, threads=1))


def test_size_validation():
    with pytest.raises(ValueError):
        evaluate_prefixes(RANK, POOL, TASK, [20, 10])
    with pytest.raises(ValueError):
        evaluate_prefixes(RANK, POOL, TASK, [len(POOL) + 1])
    with pytest.raises(ValueError):
        evaluate_prefixes(RANK, POOL, TASK, [0])


def test_oov_curve_matches_per_prefix_counts():
    curve = oov_curve(RANK, POOL, TASK)
    assert len(curve) == len(POOL)
    assert all(a >= b for a, b in zip(curve, curve[1:]))
    for n in (1, 7, 33, len(POOL)):
        vocab = POOL.subset(list(reversed(range(len(POOL))))[:n]).vocab()
        assert curve[n - 1] == oov_tokens(vocab, TASK)


def test_curve_roundtrip(tmp_path):
    pts = [CurvePoint(10, 123.456789, 4, 7.5), CurvePoint(20, 99.0, 0, 8.25)]
    save_curve(pts, tmp_path / "c.tsv", "cynical")
    text = (tmp_path / "c.tsv").read_text().splitlines()
    assert text[0] == "# method=cynical"
    assert text[1] == "size\tperplexity\toov_tokens\tavg_len"
    tag, back = load_curve(tmp_path / "c.tsv")
    assert tag == "cynical"
    assert [b.selection_size for b in back] == [10, 20]
    assert back[0].perplexity == pytest.approx(123.456789)
    assert math.isclose(back[1].avg_sentence_length, 8.25)


def test_task_as_its_own_selection():
    ranking = RankedSelection(tuple((i, i, 0.0) for i in range(len(TASK))))
    (p,) = evaluate_prefixes(ranking, TASK, TASK, [len(TASK)], lm_order=2, pad=100)
    assert p.oov_tokens == 0
    assert p.avg_sentence_length == pytest.approx(length_stats(TASK))
