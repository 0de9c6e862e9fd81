"""Seeded experiment runners behind the CLI subcommands.

Every runner returns plain rows (dicts) in trial order. Trial i at size n
draws from ``RandomStream(seed, i, (n,))`` regardless of how trials are
spread over workers, so the rows are byte-for-byte reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from dataclasses import asdict, dataclass, field, fields
from functools import partial

from . import stats
from .burning import (
    DEFAULT_NODE_CAP,
    bhat_exact,
    burning_number_exact,
    known_bounds,
    pair_lower_bound,
    scheme_upper_bound,
)
from .errors import GWBurnError, IncompatibleSize, InvalidParameter
from .offspring import OffspringDistribution
from .parallel import ordered_map
from .sampler import RandomStream, check_size, draw_conditioned_sequence
from .tree import Tree, build_tree, c_k_sizes, diameter

PAIR_LB_MAX_N = 20_000


class InvariantViolation(GWBurnError, AssertionError):
    """A bound ordering failed: this is a library bug, not bad input."""


@dataclass
class ExperimentConfig:
    subcommand: str
    offspring: OffspringDistribution
    n_values: list[int] = field(default_factory=list)
    trials: int = 1
    seed: int = 0
    epsilon: float = 0.1
    k_values: list[int] = field(default_factory=list)
    output_format: str = "csv"
    output_path: str | None = None
    worker_count: int = 1
    node_cap: int = DEFAULT_NODE_CAP
    timing: bool = False

    def validate(self) -> None:
        if self.trials < 1:
            raise InvalidParameter("trials must be >= 1")
        if not 0 < self.epsilon <= 1:
            raise InvalidParameter(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.output_format not in ("csv", "json"):
            raise InvalidParameter(f"unknown output format {self.output_format!r}")
        if self.worker_count < 1:
            raise InvalidParameter("workers must be >= 1")
        for n in self.n_values:
            check_size(self.offspring, n)


@dataclass
class TrialRecord:
    trial_index: int
    n: int
    seed: int
    rejection_attempts: int | None
    bhat: int
    scheme_bound: int
    pair_lb: int | None
    exact_b: int | None
    height: int
    diameter: int
    wall_time_ms: float | None = None

    def check(self) -> None:
        """Raise InvariantViolation unless pair_lb + 1 <= bhat <= exact_b <= 2 bhat."""
        if self.pair_lb is not None and not self.pair_lb + 1 <= self.bhat:
            raise InvariantViolation(f"trial {self.trial_index}: pair_lb + 1 = {self.pair_lb + 1} > bhat = {self.bhat}")
        if self.exact_b is not None:
            if not self.bhat <= self.exact_b <= 2 * self.bhat:
                raise InvariantViolation(
                    f"trial {self.trial_index}: sandwich bhat={self.bhat} <= b={self.exact_b} <= 2 bhat fails"
                )
            if self.exact_b > self.scheme_bound:
                raise InvariantViolation(f"trial {self.trial_index}: b={self.exact_b} exceeds scheme bound {self.scheme_bound}")
            if self.n >= 2 and self.exact_b > known_bounds(self.n).min():
                raise InvariantViolation(f"trial {self.trial_index}: b={self.exact_b} exceeds a known bound")


TRIAL_COLUMNS = [f.name for f in fields(TrialRecord)]


def tree_record(tree: Tree, trial_index: int, seed: int, attempts: int | None,
                node_cap: int = DEFAULT_NODE_CAP, timing: bool = False) -> TrialRecord:
    t0 = time.perf_counter()
    bhat, _ = bhat_exact(tree)
    scheme, _, _ = scheme_upper_bound(tree)
    pair_lb = pair_lower_bound(tree)[0] if tree.n <= PAIR_LB_MAX_N else None
    exact_b = burning_number_exact(tree, node_cap)[0] if tree.n <= node_cap else None
    rec = TrialRecord(
        trial_index=trial_index, n=tree.n, seed=seed, rejection_attempts=attempts,
        bhat=bhat, scheme_bound=scheme, pair_lb=pair_lb, exact_b=exact_b,
        height=tree.height, diameter=diameter(tree),
    )
    if timing:
        rec.wall_time_ms = round((time.perf_counter() - t0) * 1000, 3)
    return rec


def sample_tree(dist: OffspringDistribution, n: int, seed: int, trial: int) -> tuple[Tree, int]:
    seq, attempts = draw_conditioned_sequence(dist, n, RandomStream(seed, trial, (n,)))
    return build_tree(seq), attempts


def _sample_row(trial, dist, n, seed):
    tree, attempts = sample_tree(dist, n, seed, trial)
    return tree.to_line(), {
        "trial_index": trial, "n": n, "seed": seed, "rejection_attempts": attempts,
        "height": tree.height, "diameter": diameter(tree),
    }


def run_sample(cfg: ExperimentConfig) -> list[tuple[str, dict]]:
    """(degree-sequence line, summary row) per sampled tree."""
    out = []
    for n in cfg.n_values:
        fn = partial(_sample_row, dist=cfg.offspring, n=n, seed=cfg.seed)
        out.extend(ordered_map(fn, range(cfg.trials), cfg.worker_count))
    return out


def _bounds_row(trial, dist, n, seed, node_cap, timing):
    tree, attempts = sample_tree(dist, n, seed, trial)
    rec = tree_record(tree, trial, seed, attempts, node_cap, timing)
    rec.check()
    return rec


def run_bounds(cfg: ExperimentConfig, trees: list[Tree] | None = None) -> list[TrialRecord]:
    if trees is not None:
        recs = [tree_record(t, i, cfg.seed, None, cfg.node_cap, cfg.timing) for i, t in enumerate(trees)]
        for r in recs:
            r.check()
        return recs
    recs = []
    for n in cfg.n_values:
        fn = partial(_bounds_row, dist=cfg.offspring, n=n, seed=cfg.seed,
                     node_cap=cfg.node_cap, timing=cfg.timing)
        recs.extend(ordered_map(fn, range(cfg.trials), cfg.worker_count))
    return recs


def _scaling_trial(trial, dist, n, seed):
    tree, _ = sample_tree(dist, n, seed, trial)
    return bhat_exact(tree)[0], scheme_upper_bound(tree)[0]


def run_scaling(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """Per-n medians of bhat and the scheme bound, plus log-log slopes."""
    if len(set(cfg.n_values)) < 3:
        raise InvalidParameter("scaling needs at least 3 distinct n values for a slope fit")
    rows = []
    ns = sorted(set(cfg.n_values))
    for n in ns:
        fn = partial(_scaling_trial, dist=cfg.offspring, n=n, seed=cfg.seed)
        res = ordered_map(fn, range(cfg.trials), cfg.worker_count)
        bh = [r[0] for r in res]
        sb = [r[1] for r in res]
        rows.append({
            "n": n, "trials": cfg.trials, "seed": cfg.seed,
            "median_bhat": statistics.median(bh), "median_scheme_bound": statistics.median(sb),
            "min_bhat": min(bh), "max_bhat": max(bh), "n_cuberoot": round(n ** (1 / 3), 6),
        })
    fit = {
        "slope_bhat": stats.loglog_slope(ns, [r["median_bhat"] for r in rows]),
        "slope_scheme_bound": stats.loglog_slope(ns, [r["median_scheme_bound"] for r in rows]),
    }
    return rows, fit


def cube_root_floor(x: float) -> int:
    """floor(x^(1/3)) robust to floating error near perfect cubes."""
    k = int(round(x ** (1 / 3)))
    while (k + 1) ** 3 <= x * (1 + 1e-12):
        k += 1
    while k > 0 and k**3 > x * (1 + 1e-12):
        k -= 1
    return k


def ckj_k(n: int, epsilon: float) -> int:
    return max(1, cube_root_floor(n / epsilon))


def _ckj_trial(trial, dist, n, seed, k):
    tree, _ = sample_tree(dist, n, seed, trial)
    return int(c_k_sizes(tree, k).min())


def run_ckj(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for n in cfg.n_values:
        k = ckj_k(n, cfg.epsilon)
        fn = partial(_ckj_trial, dist=cfg.offspring, n=n, seed=cfg.seed, k=k)
        mins = ordered_map(fn, range(cfg.trials), cfg.worker_count)
        ok = sum(m <= 2 * k - 1 for m in mins)
        p = ok / cfg.trials
        rows.append({
            "n": n, "epsilon": cfg.epsilon, "k": k, "threshold": 2 * k - 1,
            "trials": cfg.trials, "seed": cfg.seed, "successes": ok, "fraction": p,
            "stderr": math.sqrt(p * (1 - p) / cfg.trials), "max_min_ckj": max(mins),
        })
    return rows


ESTIMATE_COLUMNS = ["n", "parameter", "estimate", "stderr", "trials", "seed"]


def run_pairs(cfg: ExperimentConfig, i_max: int = 50) -> list[dict]:
    rows = []
    for n in cfg.n_values:
        for i, est, se in stats.estimate_pair_ratio(cfg.offspring, n, i_max, cfg.trials, cfg.seed, cfg.worker_count):
            rows.append({"n": n, "parameter": i, "estimate": est, "stderr": se, "trials": cfg.trials, "seed": cfg.seed})
    return rows


def run_tails(cfg: ExperimentConfig, size_cap: int = 10**6) -> list[dict]:
    k_values = cfg.k_values or [1, 2, 5, 10, 20, 50]
    rows = []
    if not cfg.n_values:
        for k, p, se in stats.estimate_height_tail(cfg.offspring, k_values, cfg.trials, size_cap, cfg.seed, cfg.worker_count):
            rows.append({"n": "", "parameter": k, "estimate": p, "stderr": se, "trials": cfg.trials, "seed": cfg.seed})
    for n in cfg.n_values:
        for k, p, se in stats.estimate_subtree_tails(cfg.offspring, n, k_values, cfg.trials, cfg.seed, cfg.worker_count):
            rows.append({"n": n, "parameter": k, "estimate": p, "stderr": se, "trials": cfg.trials, "seed": cfg.seed})
    return rows


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(rows, columns=None) -> str:
    rows = [asdict(r) if hasattr(r, "__dataclass_fields__") else r for r in rows]
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def to_json(obj) -> str:
    def conv(o):
        if hasattr(o, "__dataclass_fields__"):
            return asdict(o)
        raise TypeError(f"cannot serialise {type(o).__name__}")

    if isinstance(obj, list):
        obj = [asdict(r) if hasattr(r, "__dataclass_fields__") else r for r in obj]
    return json.dumps(obj, indent=1, default=conv) + "\n"


__all__ = [
    "ExperimentConfig", "TrialRecord", "InvariantViolation", "IncompatibleSize",
    "run_sample", "run_bounds", "run_scaling", "run_ckj", "run_pairs", "run_tails",
    "to_csv", "to_json", "ckj_k", "TRIAL_COLUMNS", "ESTIMATE_COLUMNS",
]
