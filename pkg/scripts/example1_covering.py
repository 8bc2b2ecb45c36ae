"""Covering verdicts for the Example 1 signal as train length and cloud size vary.

Short trains (d=2) fold the curve onto itself; from d=3 on it is a simple
closed curve. The table shows the largest local PCA ratio next to each
verdict.
"""
import argparse

from samplecurve import TrainConfig, covering_test, make_example1, sample_cloud


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tau", type=float, default=0.2)
    parser.add_argument("--d", type=int, nargs="+", default=[2, 3, 4, 5])
    parser.add_argument("--M", type=int, nargs="+", default=[1000, 4000, 16000])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sig = make_example1()
    print(f"{'d':>3} {'M':>7} {'covering':>9} {'max ratio':>10} {'witnesses':>10}")
    for d in args.d:
        for M in args.M:
            cloud = sample_cloud(sig, TrainConfig(d, args.tau), M, seed=args.seed)
            v = covering_test(cloud)
            print(f"{d:>3} {M:>7} {str(v.is_covering):>9} {v.max_ratio:>10.3f} {len(v.witnesses):>10}")


if __name__ == "__main__":
    main()
