"""Acceptance checks, runnable from pytest or ``gwburn verify``.

Each check returns a CheckResult; statistical checks also carry the CSV
of the estimates they judged, so determinism can be compared byte for
byte across worker counts.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy import stats as sps

from . import stats
from .burning import (
    bhat_exact,
    burning_number_exact,
    known_bounds,
    min_ball_cover,
    pair_lower_bound,
    scheme_cover,
    scheme_upper_bound,
    verify_cover,
)
from .experiments import ExperimentConfig, ckj_k, run_ckj, run_pairs, run_scaling, to_csv
from .offspring import make_builtin
from .oracles import brute_min_cover
from .parallel import ordered_map
from .sampler import RandomStream, draw_conditioned_sequence
from .tree import all_sequences, build_tree, enumerate_trees, path_tree, rotate, validate

DEFAULT_SEED = 20240322


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    table: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion:>2} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(criterion, name):
    def deco(fn):
        def wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            res = fn(*args, **kwargs)
            res.criterion, res.name = criterion, name
            res.seconds = time.perf_counter() - t0
            return res
        wrapper.__name__ = fn.__name__
        wrapper.criterion = criterion
        return wrapper
    return deco


@_timed(1, "path formula b(P_n) = ceil(sqrt n)")
def check_path_formula(n_max: int = 64) -> CheckResult:
    bad = [n for n in range(1, n_max + 1)
           if burning_number_exact(path_tree(n))[0] != math.isqrt(n - 1) + 1]
    return CheckResult(0, "", not bad, f"n=1..{n_max}, mismatches={bad}")


@_timed(2, "sandwich and bound ordering on all trees")
def check_sandwich_sweep(s_max: int = 10) -> CheckResult:
    count = 0
    failures = []
    for s in range(1, s_max + 1):
        kb = known_bounds(s) if s >= 2 else None
        for seq in enumerate_trees(s):
            tree = build_tree(seq)
            count += 1
            b, _ = burning_number_exact(tree)
            bh, _ = bhat_exact(tree)
            sb, _, _ = scheme_upper_bound(tree)
            lb, _ = pair_lower_bound(tree)
            ok = bh <= b <= 2 * bh and b <= sb and lb + 1 <= bh
            if kb is not None:
                ok = ok and b <= kb.min()
            if not ok:
                failures.append(seq)
    return CheckResult(0, "", not failures, f"{count} trees, s<={s_max}, failures={failures[:3]}")


@_timed(3, "greedy ball cover is optimal")
def check_greedy_optimality(s_max: int = 9, radii=(0, 1, 2, 3)) -> CheckResult:
    count = 0
    bad = []
    for s in range(1, s_max + 1):
        for seq in enumerate_trees(s):
            tree = build_tree(seq)
            for r in radii:
                count += 1
                if min_ball_cover(tree, r)[0] != brute_min_cover(tree, r):
                    bad.append((seq, r))
    return CheckResult(0, "", not bad, f"{count} (tree, r) cases, mismatches={bad[:3]}")


@_timed(4, "exactly one rotation validates")
def check_rotation_lemma(s_max: int = 8, max_entry: int = 4) -> CheckResult:
    count = 0
    bad = []
    for s in range(1, s_max + 1):
        for seq in all_sequences(s, max_entry):
            if sum(seq) != s - 1:
                continue
            count += 1
            hits = sum(validate(rotate(seq, r)) for r in range(s))
            if hits != 1:
                bad.append(seq)
    return CheckResult(0, "", not bad, f"{count} sequences, s<={s_max}, entries<={max_entry}, bad={bad[:3]}")


def _cover_trial(trial, dist, n, seed, k_max):
    seq, _ = draw_conditioned_sequence(dist, n, RandomStream(seed, trial, (n,)))
    tree = build_tree(seq)
    bad = 0
    for k in range(1, k_max + 1):
        for j in range(k):
            bad += not verify_cover(tree, scheme_cover(tree, k, j))
    return tree.height, bad


@_timed(5, "covering scheme always covers")
def check_scheme_cover(trials: int = 100, n: int = 1000, k_max: int = 10,
                       seed: int = DEFAULT_SEED, workers: int = 1) -> CheckResult:
    dist = make_builtin("poisson1")
    fn = partial(_cover_trial, dist=dist, n=n, seed=seed, k_max=k_max)
    res = ordered_map(fn, range(trials), workers)
    violations = sum(b for _, b in res)
    table = to_csv([{"trial": i, "height": h, "violations": b} for i, (h, b) in enumerate(res)])
    cases = trials * k_max * (k_max + 1) // 2
    return CheckResult(0, "", violations == 0, f"{cases} (tree, k, j) cases on T_{n}, violations={violations}", table=table)


def _exactness_trial(trial, dist, n, seed):
    seq, _ = draw_conditioned_sequence(dist, n, RandomStream(seed, trial, (n,)))
    return " ".join(map(str, seq.tolist()))


@_timed(6, "sampler is uniform on plane trees")
def check_sampler_exactness(samples: int = 100_000, n: int = 5, alpha: float = 1e-3,
                            seed: int = DEFAULT_SEED, workers: int = 1) -> CheckResult:
    dist = make_builtin("geometric_half")
    fn = partial(_exactness_trial, dist=dist, n=n, seed=seed)
    counts = Counter(ordered_map(fn, range(samples), workers))
    trees = [" ".join(map(str, t)) for t in enumerate_trees(n)]
    observed = np.array([counts.get(t, 0) for t in trees])
    stray = samples - int(observed.sum())
    chi2, p = sps.chisquare(observed)
    table = to_csv([{"tree": t, "count": int(c)} for t, c in zip(trees, observed)])
    ok = stray == 0 and p >= alpha
    return CheckResult(0, "", ok, f"{len(trees)} trees, chi2={chi2:.2f}, p={p:.4f} (reject if < {alpha})", table=table)


@_timed(7, "Borel law and size LLT")
def check_borel_llt(trials: int = 1_000_000, seed: int = DEFAULT_SEED, workers: int = 1) -> CheckResult:
    dist = make_builtin("poisson1")
    s_big = 10**4
    ratio = stats.borel_pmf(s_big) * math.sqrt(2 * math.pi * float(s_big) ** 3)
    asym_ok = abs(ratio - 1) <= 0.02
    rows = stats.estimate_size_pmf(dist, [1, 2, 3, 5, 10], trials, seed, workers=workers)
    zs = []
    for s, p, se in rows:
        zs.append(abs(p - stats.borel_pmf(s)) / se)
    emp_ok = all(z <= 3 for z in zs)
    table = to_csv([{"parameter": s, "estimate": p, "stderr": se, "trials": trials, "seed": seed} for s, p, se in rows])
    detail = f"borel*sqrt(2 pi s^3) at s=1e4: {ratio:.6f}; |z| per s: {[round(z, 2) for z in zs]}"
    return CheckResult(0, "", asym_ok and emp_ok, detail, table=table)


@_timed(8, "sum LLT at s=m=100")
def check_sum_llt(trials: int = 1_000_000, seed: int = DEFAULT_SEED, workers: int = 1) -> CheckResult:
    dist = make_builtin("poisson1")
    p, se = stats.estimate_sum_pmf(dist, 100, 100, trials, seed, workers)
    target = stats.llt_sum_asymptote(dist, 100, 100)
    z = abs(p - target) / se
    table = to_csv([{"parameter": 100, "estimate": p, "stderr": se, "trials": trials, "seed": seed}])
    return CheckResult(0, "", z <= 3, f"empirical {p:.6f} vs asymptote {target:.6f}, |z|={z:.2f}", table=table)


@_timed(9, "height tail k Pr(h >= k) in [1.5, 2.5]")
def check_height_tail(trials: int = 1_000_000, k_values=(20, 50), size_cap: int = 10**6,
                      seed: int = DEFAULT_SEED, workers: int = 1) -> CheckResult:
    dist = make_builtin("poisson1")
    rows = stats.estimate_height_tail(dist, list(k_values), trials, size_cap, seed, workers)
    scaled = [k * p for k, p, _ in rows]
    ok = all(1.5 <= x <= 2.5 for x in scaled)
    table = to_csv([{"parameter": k, "estimate": p, "stderr": se, "trials": trials, "seed": seed} for k, p, se in rows])
    return CheckResult(0, "", ok, f"k*Pr: {dict(zip(k_values, [round(x, 4) for x in scaled]))}", table=table)


@_timed(10, "pair ratio E[P_i]/(n i) bounded and stable")
def check_pair_ratio(n_values=(1000, 2000), i_max: int = 50, trials: int = 200,
                     seed: int = DEFAULT_SEED, workers: int = 1) -> CheckResult:
    cfg = ExperimentConfig("pairs", make_builtin("poisson1"), list(n_values), trials, seed, worker_count=workers)
    rows = run_pairs(cfg, i_max)
    maxima = {n: max(r["estimate"] for r in rows if r["n"] == n) for n in n_values}
    vals = list(maxima.values())
    finite = all(math.isfinite(v) for v in vals)
    rel = abs(vals[0] - vals[1]) / max(vals)
    return CheckResult(0, "", finite and rel <= 0.2,
                       f"max ratio per n: { {k: round(v, 4) for k, v in maxima.items()} }, relative gap {rel:.3f}",
                       table=to_csv(rows))


@_timed(11, "scaling exponent of median bhat in [0.25, 0.42]")
def check_scaling(n_values=(1000, 10_000, 100_000), trials: int = 50, seed: int = 1,
                  workers: int = 1) -> CheckResult:
    cfg = ExperimentConfig("scaling", make_builtin("poisson1"), list(n_values), trials, seed, worker_count=workers)
    rows, fit = run_scaling(cfg)
    slope = fit["slope_bhat"]
    table = to_csv(rows) + to_csv([fit])
    medians = {r["n"]: r["median_bhat"] for r in rows}
    return CheckResult(0, "", 0.25 <= slope <= 0.42, f"medians {medians}, slope {slope:.4f}", table=table)


@_timed(12, "C_k^j frequency at k = floor((n/eps)^(1/3))")
def check_ckj_frequency(n: int = 100_000, epsilon: float = 0.1, trials: int = 200,
                        seed: int = DEFAULT_SEED, workers: int = 1) -> CheckResult:
    cfg = ExperimentConfig("ckj", make_builtin("poisson1"), [n], trials, seed, epsilon, worker_count=workers)
    (row,) = run_ckj(cfg)
    ok = row["fraction"] >= 0.9 and row["k"] == ckj_k(n, epsilon)
    return CheckResult(0, "", ok, f"k={row['k']}, fraction={row['fraction']:.3f}, worst min_j |C|={row['max_min_ckj']}",
                       table=to_csv([row]))


ORACLE_CHECKS = [check_path_formula, check_sandwich_sweep, check_greedy_optimality, check_rotation_lemma]
STATISTICAL_CHECKS = [check_scheme_cover, check_sampler_exactness, check_borel_llt, check_sum_llt,
                      check_height_tail, check_pair_ratio, check_scaling, check_ckj_frequency]


@_timed(13, "byte-identical outputs across worker counts")
def check_determinism(worker_counts=(1, 2), reference: dict | None = None) -> CheckResult:
    """Rerun every statistical check at each worker count and compare tables.

    ``reference`` maps criterion -> table from an earlier run with default
    seeds; it is compared too, and saves one rerun.
    """
    differing = []
    for check in STATISTICAL_CHECKS:
        tables = [] if reference is None else [reference[check.criterion]]
        for w in worker_counts:
            if reference is not None and w == 1:
                continue
            tables.append(check(workers=w).table)
        if any(t != tables[0] for t in tables[1:]):
            differing.append(check.criterion)
    return CheckResult(0, "", not differing,
                       f"criteria 5-12 at workers {list(worker_counts)}, differing={differing}")


def run_suite(suite: str, workers: int = 1, log=print) -> list[CheckResult]:
    results = []
    if suite in ("oracle", "all"):
        for check in ORACLE_CHECKS:
            results.append(check())
            log(results[-1].line())
    if suite in ("statistical", "all"):
        reference = {}
        for check in STATISTICAL_CHECKS:
            res = check(workers=workers)
            reference[res.criterion] = res.table
            results.append(res)
            log(res.line())
        ref = reference if workers == 1 else None
        results.append(check_determinism((1, 2), reference=ref))
        log(results[-1].line())
    return results
