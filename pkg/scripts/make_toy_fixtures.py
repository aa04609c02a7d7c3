"""Regenerate the small parallel fixtures under tests/data."""
from pathlib import Path

from dataselect.config import PipelineConfig
from dataselect.pipeline import run
from dataselect.synthetic import SyntheticConfig, make_parallel

OUT = Path(__file__).resolve().parent.parent / "tests" / "data"
GOLDEN_FILES = ("scores.tsv", "ranking.tsv", "selected.txt", "selected.50.txt",
                "selected.100.txt", "selected.200.txt", "curves.tsv")


def golden_config(data: Path, out) -> PipelineConfig:
    """The ml-mono run whose outputs are committed under tests/data/golden."""
    return PipelineConfig(task=str(data / "toy_task.txt"), pool=str(data / "toy_pool.txt"),
                          out=str(out), method="ml-mono", order=3, eval_order=3, pad=1000,
                          sizes=[50, 100, 200])


def main() -> None:
    cfg = SyntheticConfig(seed=7, task_sentences=40, pool_sentences=300, function_words=20,
                          task_words=150, general_words=600, task_len=9.0,
                          pool_in_domain_len=7.0, pool_general_len=7.0)
    task, pool = make_parallel(cfg)
    OUT.mkdir(parents=True, exist_ok=True)
    task.source.save(OUT / "toy_task.txt")
    task.target.save(OUT / "toy_task.tgt.txt")
    pool.source.save(OUT / "toy_pool.txt")
    pool.target.save(OUT / "toy_pool.tgt.txt")
    golden = OUT / "golden"
    run(golden_config(OUT, golden / "work"))
    for name in GOLDEN_FILES:
        (golden / "work" / name).replace(golden / name)
    for leftover in (golden / "work").iterdir():
        leftover.unlink()
    (golden / "work").rmdir()


if __name__ == "__main__":
    main()
