"""Height tails of unconditioned trees next to the exact generating-function values."""

import argparse

from gwburn.offspring import parse_offspring
from gwburn.stats import estimate_height_tail, height_tail_exact


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--offspring", default="poisson")
    ap.add_argument("--k", nargs="+", type=int, default=[1, 2, 5, 10, 20, 50, 100])
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--size-cap", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    dist = parse_offspring(args.offspring)
    print("k,estimate,stderr,exact,k_times_estimate")
    for k, p, se in estimate_height_tail(dist, args.k, args.trials, args.size_cap, args.seed, args.workers):
        print(f"{k},{p:.6g},{se:.3g},{height_tail_exact(dist, k):.6g},{k * p:.4f}")


if __name__ == "__main__":
    main()
