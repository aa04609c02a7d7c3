"""Desk-scale comparison of all selection methods on the synthetic instance.

Writes the two-domain corpora, runs the full pipeline once per method and
prints perplexity, OOV and length curves side by side.

    python3 scripts/desk_experiment.py --out desk --clusters 100
"""
import argparse
import logging
import time
from pathlib import Path

from dataselect.config import METHODS, PipelineConfig
from dataselect.evaluation import load_curve
from dataselect.pipeline import run
from dataselect.synthetic import SyntheticConfig, make_parallel


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="desk")
    ap.add_argument("--seed", type=int, default=SyntheticConfig.seed)
    ap.add_argument("--pool-sentences", type=int, default=SyntheticConfig.pool_sentences)
    ap.add_argument("--clusters", type=int, default=100,
                    help="Brown clusters for the LDM methods (1000 is slow at this vocabulary size)")
    ap.add_argument("--methods", default=",".join(METHODS))
    ap.add_argument("--sizes", default="1000,2500,5000,10000,20000")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    out = Path(args.out)
    data = out / "data"
    data.mkdir(parents=True, exist_ok=True)
    cfg = SyntheticConfig(seed=args.seed, pool_sentences=args.pool_sentences)
    task, pool = make_parallel(cfg)
    for name, corpus in (("task", task.source), ("task.tgt", task.target),
                         ("pool", pool.source), ("pool.tgt", pool.target)):
        corpus.save(data / ("%s.txt" % name))

    sizes = [int(x) for x in args.sizes.split(",")]
    curves = {}
    for method in args.methods.split(","):
        bi = method.endswith("-bi")
        pc = PipelineConfig(task=str(data / "task.txt"), pool=str(data / "pool.txt"),
                            task_tgt=str(data / "task.tgt.txt") if bi else None,
                            pool_tgt=str(data / "pool.tgt.txt") if bi else None,
                            out=str(out / method), method=method, clusters=args.clusters,
                            batch=method == "cynical", sizes=sizes, threads=args.threads)
        t0 = time.perf_counter()
        run(pc)
        logging.info("%s finished in %.1fs", method, time.perf_counter() - t0)
        curves[method] = load_curve(out / method / "curves.tsv")[1]

    print("\ntask avg length %.2f, pool avg length %.2f"
          % (task.source.token_count / len(task.source), pool.source.token_count / len(pool.source)))
    for field, fmt in (("perplexity", "%10.1f"), ("oov_tokens", "%10d"),
                       ("avg_sentence_length", "%10.2f")):
        print("\n%s" % field)
        print("%-10s" % "size" + "".join("%10d" % n for n in sizes))
        for method, pts in curves.items():
            print("%-10s" % method + "".join(fmt % getattr(p, field) for p in pts))


if __name__ == "__main__":
    main()
