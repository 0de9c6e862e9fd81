"""Command line harness.

    gwburn sample  --offspring geometric --n 5 --trials 3 --seed 7 --out trees/
    gwburn bounds  path_to_tree.txt
    gwburn scaling --offspring poisson --n 1000 --n 10000 --n 100000 --trials 50
    gwburn ckj     --n 100000 --epsilon 0.1 --trials 200
    gwburn pairs   --n 1000 --trials 200
    gwburn tails   --k 20 --k 50 --trials 1000000
    gwburn verify  oracle

Exit codes: 0 ok, 1 property failure, 2 configuration error, 3 sampling
failure, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import experiments as ex
from .burning import DEFAULT_NODE_CAP
from .errors import GWBurnError, IncompatibleSize, InvalidParameter, InvalidSequence, RejectionLimitExceeded
from .offspring import parse_offspring
from .tree import read_tree

EXIT_OK, EXIT_PROPERTY, EXIT_CONFIG, EXIT_SAMPLING, EXIT_INVARIANT = 0, 1, 2, 3, 4


class ConfigError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser, n_required=False) -> None:
    p.add_argument("--offspring", default="poisson",
                   help="poisson | geometric | binomial:d | two_point:m | custom:FILE")
    p.add_argument("--n", type=int, action="append", default=[], dest="n_values",
                   help="tree size (repeatable)", required=n_required)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help="defaults to $GWBURN_SEED, then 0")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--k", type=int, action="append", default=[], dest="k_values")
    p.add_argument("--format", choices=("csv", "json"), default="csv", dest="output_format")
    p.add_argument("--out", default=None, dest="output_path")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    p.add_argument("--timing", action="store_true", help="fill the wall_time_ms column (breaks byte-reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwburn", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("sample", help="sample conditioned trees to files"), n_required=True)
    p = sub.add_parser("bounds", help="burning-number bounds per tree")
    _add_common(p)
    p.add_argument("tree_files", nargs="*", help="degree-sequence files; otherwise sample --n trees")
    _add_common(sub.add_parser("scaling", help="median bhat versus n with a log-log slope"), n_required=True)
    _add_common(sub.add_parser("ckj", help="frequency of min_j |C_k^j| <= 2k-1"), n_required=True)
    p = sub.add_parser("pairs", help="Monte Carlo E[P_i]/(n i)")
    _add_common(p, n_required=True)
    p.add_argument("--i-max", type=int, default=50)
    p = sub.add_parser("tails", help="height tails of unconditioned trees, or subtree tails of T_n with --n")
    _add_common(p)
    p.add_argument("--size-cap", type=int, default=10**6)
    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("suite", choices=("oracle", "statistical", "all"))
    p.add_argument("--workers", type=int, default=1)
    return parser


def _seed(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("GWBURN_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"GWBURN_SEED={env!r} is not an integer") from None


def make_config(args) -> ex.ExperimentConfig:
    try:
        dist = parse_offspring(args.offspring)
    except InvalidParameter as exc:
        raise ConfigError(str(exc)) from None
    seed = _seed(args.seed)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a non-negative 64-bit integer")
    cfg = ex.ExperimentConfig(
        subcommand=args.command, offspring=dist, n_values=args.n_values, trials=args.trials,
        seed=seed, epsilon=args.epsilon, k_values=args.k_values,
        output_format=args.output_format, output_path=args.output_path,
        worker_count=args.workers, node_cap=args.node_cap, timing=args.timing,
    )
    try:
        cfg.validate()
    except (InvalidParameter, IncompatibleSize) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _emit(cfg: ex.ExperimentConfig, text: str, default_name: str | None = None) -> None:
    if cfg.output_path:
        path = Path(cfg.output_path)
        if path.is_dir() and default_name:
            path = path / default_name
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render(cfg, rows, columns=None) -> str:
    if cfg.output_format == "json":
        return ex.to_json(rows)
    return ex.to_csv(rows, columns)


def cmd_sample(cfg: ex.ExperimentConfig) -> int:
    out_dir = Path(cfg.output_path or "trees")
    out_dir.mkdir(parents=True, exist_ok=True)
    pairs = ex.run_sample(cfg)
    rows = []
    for line, row in pairs:
        name = f"tree_n{row['n']}_s{row['seed']}_t{row['trial_index']:05d}.txt"
        (out_dir / name).write_text(line + "\n", encoding="utf-8")
        rows.append({**row, "file": name})
    text = _render(cfg, rows)
    (out_dir / f"summary.{cfg.output_format}").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_bounds(cfg: ex.ExperimentConfig, files) -> int:
    if files:
        try:
            trees = [read_tree(f) for f in files]
        except (OSError, InvalidSequence) as exc:
            raise ConfigError(str(exc)) from None
        recs = ex.run_bounds(cfg, trees)
    else:
        if not cfg.n_values:
            raise ConfigError("bounds needs tree files or at least one --n")
        recs = ex.run_bounds(cfg)
    _emit(cfg, _render(cfg, recs, ex.TRIAL_COLUMNS), "bounds." + cfg.output_format)
    return EXIT_OK


def cmd_scaling(cfg: ex.ExperimentConfig) -> int:
    try:
        rows, fit = ex.run_scaling(cfg)
    except InvalidParameter as exc:
        raise ConfigError(str(exc)) from None
    if cfg.output_format == "json":
        text = ex.to_json({"rows": rows, "fit": fit})
    else:
        # long format keeps one header for both the per-n medians and the fit
        long = []
        for r in rows:
            for key in ("median_bhat", "median_scheme_bound", "min_bhat", "max_bhat"):
                long.append({"statistic": key, "n": r["n"], "value": r[key], "trials": r["trials"], "seed": r["seed"]})
        for key, val in fit.items():
            long.append({"statistic": key, "n": "", "value": val, "trials": cfg.trials, "seed": cfg.seed})
        text = ex.to_csv(long, ["statistic", "n", "value", "trials", "seed"])
    _emit(cfg, text, "scaling." + cfg.output_format)
    print(f"slope of log median bhat vs log n: {fit['slope_bhat']:.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_ckj(cfg: ex.ExperimentConfig) -> int:
    _emit(cfg, _render(cfg, ex.run_ckj(cfg)), "ckj." + cfg.output_format)
    return EXIT_OK


def cmd_pairs(cfg: ex.ExperimentConfig, i_max: int) -> int:
    _emit(cfg, _render(cfg, ex.run_pairs(cfg, i_max), ex.ESTIMATE_COLUMNS), "pairs." + cfg.output_format)
    return EXIT_OK


def cmd_tails(cfg: ex.ExperimentConfig, size_cap: int) -> int:
    _emit(cfg, _render(cfg, ex.run_tails(cfg, size_cap), ex.ESTIMATE_COLUMNS), "tails." + cfg.output_format)
    return EXIT_OK


def cmd_verify(suite: str, workers: int) -> int:
    from .checks import run_suite

    results = run_suite(suite, workers)
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"FAILED: criterion {failed[0].criterion} ({failed[0].name})", file=sys.stderr)
        return EXIT_PROPERTY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.suite, args.workers)
        cfg = make_config(args)
        if args.command == "sample":
            return cmd_sample(cfg)
        if args.command == "bounds":
            return cmd_bounds(cfg, args.tree_files)
        if args.command == "scaling":
            return cmd_scaling(cfg)
        if args.command == "ckj":
            return cmd_ckj(cfg)
        if args.command == "pairs":
            return cmd_pairs(cfg, args.i_max)
        if args.command == "tails":
            return cmd_tails(cfg, args.size_cap)
    except ConfigError as exc:
        print(f"gwburn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RejectionLimitExceeded as exc:
        print(f"gwburn: sampling failed: {exc}", file=sys.stderr)
        return EXIT_SAMPLING
    except ex.InvariantViolation as exc:
        print(f"gwburn: invariant violation (library bug): {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InvalidParameter, IncompatibleSize) as exc:
        print(f"gwburn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GWBurnError as exc:
        print(f"gwburn: {exc}", file=sys.stderr)
        return EXIT_SAMPLING
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
