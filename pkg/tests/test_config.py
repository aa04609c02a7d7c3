import pytest
from hypothesis import given, strategies as st

from dataselect.config import METHODS, ConfigError, PipelineConfig


def base(**kw):
    return PipelineConfig(task="t.txt", pool="p.txt", **kw)


@given(st.sampled_from(["ml-mono", "ldm-mono", "cynical"]), st.integers(1, 8),
       st.integers(0, 10**7), st.lists(st.integers(1, 10**6), unique=True).map(sorted),
       st.booleans(), st.one_of(st.none(), st.integers(0, 10**6)))
def test_json_roundtrip_is_identical(method, order, pad, sizes, batch, budget):
    cfg = base(method=method, order=order, pad=pad, sizes=sizes, batch=batch, budget=budget)
    cfg.validate()
    text = cfg.to_json()
    assert PipelineConfig.from_json(text) == cfg
    assert PipelineConfig.from_json(text).to_json() == text


@pytest.mark.parametrize("kw, match", [
    (dict(method="ml-bi"), "target-side"),
    (dict(method="ldm-bi", task_tgt="x"), "target-side"),
    (dict(method="cynical", task_tgt="x", pool_tgt="y"), "monolingual"),
    (dict(method="bogus"), "unknown method"),
    (dict(order=0), "order"),
    (dict(clusters=0), "clusters"),
    (dict(threads=0), "threads"),
    (dict(pad=-1), "pad"),
    (dict(budget=-1), "budget"),
    (dict(delta=0.0), "delta"),
    (dict(sizes=[5, 5]), "sizes"),
    (dict(sizes=[10, 5]), "sizes"),
    (dict(sizes=[0]), "sizes"),
])
def test_invalid_combinations_rejected(kw, match):
    with pytest.raises(ConfigError, match=match):
        base(**kw).validate()


def test_missing_paths_and_unknown_keys(tmp_path):
    with pytest.raises(ConfigError):
        PipelineConfig().validate()
    with pytest.raises(ConfigError, match="colour"):
        PipelineConfig.from_dict({"task": "t", "colour": "red"})
    p = tmp_path / "c.json"
    p.write_text(base(method="cynical").to_json())
    assert PipelineConfig.load(p).method == "cynical"


def test_override_ignores_none():
    cfg = base(order=4).override(order=None, method="ldm-mono")
    assert cfg.order == 4 and cfg.method == "ldm-mono"
    assert set(METHODS) >= {"ml-mono", "ml-bi", "ldm-mono", "ldm-bi", "cynical"}
