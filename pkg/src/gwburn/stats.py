"""Distance-pair counts, Monte Carlo estimators and closed-form oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import _kernels
from .errors import CapExceeded, IncompatibleSize
from .offspring import OffspringDistribution
from .parallel import ordered_map

DEFAULT_PAIR_CAP = 20_000 * 20_000 // 2
BLOCK = 1 << 16

# stream tags keep estimators from sharing random streams under one seed
TAG_HEIGHT, TAG_SIZE, TAG_SUM, TAG_SUBTREE = 101, 102, 103, 104


@dataclass(frozen=True)
class PairCountProfile:
    """p[i] = number of unordered pairs at distance i (p[0] = 0)."""

    n: int
    p: np.ndarray
    q_prefix: np.ndarray

    def q(self, j: int) -> int:
        """Pairs at distance at most j."""
        if j <= 0 or self.p.shape[0] <= 1:
            return 0
        return int(self.q_prefix[min(j, self.q_prefix.shape[0] - 1)])

    @property
    def total(self) -> int:
        return int(self.p.sum())


def pair_counts(tree, pair_cap: int = DEFAULT_PAIR_CAP) -> PairCountProfile:
    n = tree.n
    if n * n // 2 > pair_cap:
        raise CapExceeded(f"all-pairs distances on n={n} exceed the work cap {pair_cap}")
    hist = _kernels.distance_histogram(tree.child_offsets, tree.children, tree.parent)
    last = int(np.flatnonzero(hist)[-1]) if hist.any() else 0
    p = hist[: last + 1].copy()
    return PairCountProfile(n, p, np.cumsum(p))


def _mean_se(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = x.mean(axis=0)
    if x.shape[0] < 2:
        return m, np.zeros_like(m)
    return m, x.std(axis=0, ddof=1) / math.sqrt(x.shape[0])


def _prop_se(hits: int, trials: int) -> tuple[float, float]:
    p = hits / trials
    return p, math.sqrt(p * (1 - p) / trials)


def _pair_trial(trial: int, dist, n, i_max, seed, method):
    from .sampler import RandomStream, sample_conditioned

    tree = sample_conditioned(dist, n, RandomStream(seed, trial, (n,)), method=method)
    prof = pair_counts(tree)
    row = np.zeros(i_max, dtype=np.float64)
    m = min(i_max, prof.p.shape[0] - 1)
    row[:m] = prof.p[1 : m + 1]
    return row


def estimate_pair_ratio(
    dist: OffspringDistribution,
    n: int,
    i_max: int,
    trials: int,
    seed: int,
    workers: int = 1,
    method: str = "histogram",
) -> list[tuple[int, float, float]]:
    """Rows (i, mean of P_i / (n i), standard error) for i = 1..i_max."""
    if trials < 2:
        raise ValueError("need at least 2 trials for a standard error")
    if n * n // 2 > DEFAULT_PAIR_CAP:
        raise CapExceeded(f"n={n} exceeds the pair-count cap")
    fn = partial(_pair_trial, dist=dist, n=n, i_max=i_max, seed=seed, method=method)
    counts = np.stack(ordered_map(fn, range(trials), workers))
    i = np.arange(1, i_max + 1)
    ratios = counts / (n * i)
    mean, se = _mean_se(ratios)
    return [(int(a), float(b), float(c)) for a, b, c in zip(i, mean, se)]


def borel_pmf(s: int) -> float:
    """exp(-s) s^(s-1) / s!: total progeny law of the Poisson(1) tree."""
    if s < 1:
        raise ValueError("s must be >= 1")
    return math.exp(-s + (s - 1) * math.log(s) - math.lgamma(s + 1))


def llt_size_asymptote(dist: OffspringDistribution, s: int) -> float:
    """h / sqrt(2 pi sigma^2 s^3), the large-s behaviour of Pr(|T| = s)."""
    if s < 1 or (s - 1) % dist.span:
        raise IncompatibleSize(f"s={s} is not 1 mod span {dist.span}")
    return dist.span / math.sqrt(2 * math.pi * dist.variance * float(s) ** 3)


def llt_sum_asymptote(dist: OffspringDistribution, s: int, m: int) -> float:
    """Gaussian local approximation to Pr(S_s = m) on the span lattice."""
    if m % dist.span:
        raise IncompatibleSize(f"m={m} is not 0 mod span {dist.span}")
    s2 = dist.variance
    return dist.span / math.sqrt(2 * math.pi * s2 * s) * math.exp(-((m - s) ** 2) / (2 * s * s2))


def _blocks(trials: int):
    start = 0
    b = 0
    while start < trials:
        size = min(BLOCK, trials - start)
        yield b, size
        start += size
        b += 1


def _height_block(arg, dist, k_max, size_cap, seed):
    from .sampler import RandomStream

    b, size = arg
    rng = RandomStream(seed, b, (TAG_HEIGHT,)).generator()
    z = np.ones(size, dtype=np.int64)
    total = np.ones(size, dtype=np.int64)
    height = np.zeros(size, dtype=np.int64)
    over = np.zeros(size, dtype=bool)
    for t in range(1, k_max + 1):
        live = np.flatnonzero((z > 0) & ~over)
        if live.size == 0:
            break
        nxt = dist.sum_of(rng, z[live])
        z[:] = 0
        z[live] = nxt
        total[live] += nxt
        height[live[nxt > 0]] = t
        over[live[total[live] > size_cap]] = True
    height[over] = np.iinfo(np.int64).max
    return height


def estimate_height_tail(
    dist: OffspringDistribution,
    k_values,
    trials: int,
    size_cap: int,
    seed: int,
    workers: int = 1,
) -> list[tuple[int, float, float]]:
    """Rows (k, empirical Pr(h(T) >= k), standard error) for the unconditioned tree.

    Generation sizes evolve by exact convolutions of the offspring law.
    Trees whose size passes ``size_cap`` count as tail events for every k.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    k_values = [int(k) for k in k_values]
    k_max = max(k_values, default=0)
    fn = partial(_height_block, dist=dist, k_max=k_max, size_cap=size_cap, seed=seed)
    heights = np.concatenate(ordered_map(fn, _blocks(trials), workers))
    rows = []
    for k in k_values:
        p, se = _prop_se(int((heights >= k).sum()), trials)
        rows.append((k, p, se))
    return rows


def _size_block(arg, dist, size_cap, seed):
    from .sampler import RandomStream

    b, size = arg
    rng = RandomStream(seed, b, (TAG_SIZE,)).generator()
    z = np.ones(size, dtype=np.int64)
    total = np.ones(size, dtype=np.int64)
    live = np.arange(size)
    while live.size:
        nxt = dist.sum_of(rng, z[live])
        z[live] = nxt
        total[live] += nxt
        live = live[(nxt > 0) & (total[live] <= size_cap)]
    total[total > size_cap] = 0  # overflow marker
    return np.bincount(total, minlength=size_cap + 1)


def estimate_size_pmf(
    dist: OffspringDistribution,
    sizes,
    trials: int,
    seed: int,
    size_cap: int | None = None,
    workers: int = 1,
) -> list[tuple[int, float, float]]:
    """Rows (s, empirical Pr(|T| = s), standard error)."""
    sizes = [int(s) for s in sizes]
    cap = max(sizes) if size_cap is None else size_cap
    fn = partial(_size_block, dist=dist, size_cap=cap, seed=seed)
    counts = np.sum(ordered_map(fn, _blocks(trials), workers), axis=0)
    return [(s, *_prop_se(int(counts[s]), trials)) for s in sizes]


def _sum_block(arg, dist, s, m, seed):
    from .sampler import RandomStream

    b, size = arg
    rng = RandomStream(seed, b, (TAG_SUM,)).generator()
    hits = 0
    # at most ~2^22 draws held at once
    step = max(1, (1 << 22) // s)
    for lo in range(0, size, step):
        rows = min(step, size - lo)
        hits += int((dist.draw(rng, (rows, s)).sum(axis=1) == m).sum())
    return hits


def estimate_sum_pmf(
    dist: OffspringDistribution, s: int, m: int, trials: int, seed: int, workers: int = 1
) -> tuple[float, float]:
    """Empirical Pr(S_s = m) from explicit i.i.d. draws, with standard error."""
    fn = partial(_sum_block, dist=dist, s=s, m=m, seed=seed)
    return _prop_se(sum(ordered_map(fn, _blocks(trials), workers)), trials)


def _subtree_trial(trial, dist, n, k_values, seed, method):
    from .sampler import RandomStream, as_generator, draw_conditioned_sequence
    from .tree import build_tree

    rng = as_generator(RandomStream(seed, trial, (TAG_SUBTREE, n)))
    seq, _ = draw_conditioned_sequence(dist, n, rng, method=method)
    tree = build_tree(seq)
    u = int(rng.integers(n))
    h = int(tree.subtree_height[u])
    return [h >= k for k in k_values]


def estimate_subtree_tails(
    dist: OffspringDistribution,
    n: int,
    k_values,
    trials: int,
    seed: int,
    workers: int = 1,
    method: str = "histogram",
) -> list[tuple[int, float, float]]:
    """Rows (k, empirical Pr(h(tau_u) >= k), se) for a uniform vertex u of T_n.

    The same trees serve every k, so the estimates are non-increasing in k.
    """
    k_values = [int(k) for k in k_values]
    fn = partial(_subtree_trial, dist=dist, n=n, k_values=k_values, seed=seed, method=method)
    hits = np.asarray(ordered_map(fn, range(trials), workers), dtype=np.int64).reshape(trials, -1)
    return [(k, *_prop_se(int(hits[:, i].sum()), trials)) for i, k in enumerate(k_values)]


def estimate_subtree_tail(
    dist: OffspringDistribution, n: int, k: int, trials: int, seed: int, workers: int = 1
) -> tuple[float, float]:
    (_, p, se), = estimate_subtree_tails(dist, n, [k], trials, seed, workers)
    return p, se


def height_tail_exact(dist: OffspringDistribution, k: int) -> float:
    """Pr(h(T) >= k) by iterating the generating function: q_{t+1} = 1 - f(1 - q_t).

    Used as an oracle; exact up to floating point for finite or tabulated laws.
    """
    if k <= 0:
        return 1.0
    if dist.kind == "poisson1":
        f = lambda x: math.exp(x - 1.0)
    elif dist.kind == "geometric_half":
        f = lambda x: 1.0 / (2.0 - x)
    else:
        vals, probs = dist.values, dist.probs
        f = lambda x: math.fsum(p * x**v for v, p in zip(vals, probs))
    q = 1.0
    for _ in range(k):
        q = 1.0 - f(1.0 - q)
    return q


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
