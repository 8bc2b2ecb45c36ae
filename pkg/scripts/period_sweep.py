"""Relative period error over cloud size, train length and tau/T.

Writes the benchmark table as CSV (stdout or --output). Cells run in
parallel with --jobs.
"""
import argparse
from pathlib import Path

from samplecurve.cli import format_benchmark_csv, run_benchmark
from samplecurve.signals import make_example1, make_sine

SIGNALS = {"sine": make_sine, "example1": make_example1}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--signal", choices=sorted(SIGNALS), default="sine")
    parser.add_argument("--M", type=int, nargs="+", default=[250, 500, 1000, 2000, 4000, 8000])
    parser.add_argument("--d", type=int, nargs="+", default=[3, 4])
    parser.add_argument("--ratio", type=float, nargs="+", default=[0.2, 0.3090169943749474, 0.7, 1.3])
    parser.add_argument("--n-iter", type=int, nargs="+", default=[10_000])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--output")
    args = parser.parse_args()

    rows = run_benchmark(SIGNALS[args.signal](), args.M, args.d, args.ratio, args.n_iter, args.seed, args.jobs)
    text = format_benchmark_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text, end="")


if __name__ == "__main__":
    main()
