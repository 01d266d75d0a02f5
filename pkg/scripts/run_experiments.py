"""Run every named experiment and write one JSON bundle per experiment.

Usage: python3 scripts/run_experiments.py [--out results/] [--seed 0] [name ...]
"""
import argparse
import sys
import time
from pathlib import Path

from uvhom.experiments import EXPERIMENTS, ExperimentSpec, run_experiment
from uvhom.io import dump_json


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=sorted(EXPERIMENTS), help="experiments to run (default: all)")
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    failed = []
    for name in args.names:
        t0 = time.perf_counter()
        bundle = run_experiment(ExperimentSpec(name, seed=args.seed))
        dump_json(bundle, args.out / f"{name}.json")
        status = "PASS" if bundle["passed"] else "FAIL"
        print(f"{name:24s} {status}  {time.perf_counter() - t0:6.2f}s")
        if not bundle["passed"]:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
