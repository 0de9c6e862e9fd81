"""Exact samplers for conditioned and unconditioned Galton-Watson trees.

Conditioned trees use rejection on S_n = n - 1 followed by the unique
valid cyclic rotation. The default ``histogram`` method draws the value
histogram of the n i.i.d. offspring counts by sequential binomials and
only materialises (and shuffles) the sequence on acceptance; ``iid``
draws all n values per attempt. Both produce the same law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import IncompatibleSize, RejectionLimitExceeded
from .offspring import OffspringDistribution
from .tree import Tree, build_tree, rotate, unique_valid_rotation

METHODS = ("histogram", "iid")


@dataclass(frozen=True)
class RandomStream:
    """A reproducible PCG64 stream keyed by (seed, stream_id).

    ``tag`` namespaces streams of different experiment parameters so
    that, e.g., trial 3 at n=1000 and trial 3 at n=2000 are independent.
    """

    seed: int
    stream_id: int = 0
    tag: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(*self.tag, self.stream_id))
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomStream):
        return rng.generator()
    raise TypeError(f"expected RandomStream or numpy Generator, got {type(rng).__name__}")


def check_size(dist: OffspringDistribution, n: int) -> None:
    if n < 1:
        raise IncompatibleSize(f"n must be >= 1, got {n}")
    if (n - 1) % dist.span:
        raise IncompatibleSize(
            f"n={n} is not 1 mod span {dist.span} of {dist.name}: Pr(S_n = n-1) = 0"
        )


def default_max_attempts(n: int) -> int:
    return 1000 * math.isqrt(n - 1) + 1000 if n > 1 else 1000


@dataclass
class _HazardTable:
    dist: OffspringDistribution
    values: list
    hazards: list

    @classmethod
    def of(cls, dist):
        values, hazards = [], []
        for v in dist.support_values():
            values.append(v)
            hazards.append(dist.hazard(v))
            if len(values) >= 64 or hazards[-1] >= 1.0:
                break
        return cls(dist, values, hazards)

    def extend(self):
        it = self.dist.support_values()
        for v in it:
            if v > self.values[-1]:
                self.values.append(v)
                self.hazards.append(self.dist.hazard(v))
                return
        raise RuntimeError("support exhausted with vertices left to place")


def _histogram_attempt(table: _HazardTable, n: int, rng: np.random.Generator):
    """One rejection attempt. Returns (values, counts) on S_n = n-1, else None."""
    remaining = n
    total = 0
    counts = []
    i = 0
    while remaining:
        if i == len(table.values):
            table.extend()
        v, h = table.values[i], table.hazards[i]
        c = remaining if h >= 1.0 else int(rng.binomial(remaining, h))
        if c:
            total += v * c
            if total > n - 1:
                return None
            remaining -= c
        counts.append(c)
        i += 1
    if total != n - 1:
        return None
    return table.values[: len(counts)], counts


def draw_conditioned_sequence(
    dist: OffspringDistribution,
    n: int,
    rng,
    max_attempts: int | None = None,
    method: str = "histogram",
) -> tuple[np.ndarray, int]:
    """Preorder degree sequence of T_n plus the number of attempts used."""
    check_size(dist, n)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if max_attempts is None:
        max_attempts = default_max_attempts(n)
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    gen = as_generator(rng)
    if n == 1:
        return np.zeros(1, dtype=np.int64), 1
    if method == "histogram":
        table = _HazardTable.of(dist)
        for attempt in range(1, max_attempts + 1):
            hit = _histogram_attempt(table, n, gen)
            if hit is not None:
                seq = np.repeat(np.asarray(hit[0], dtype=np.int64), hit[1])
                gen.shuffle(seq)
                break
        else:
            raise RejectionLimitExceeded(f"no acceptance in {max_attempts} attempts at n={n}")
    else:
        for attempt in range(1, max_attempts + 1):
            seq = dist.draw(gen, n)
            if seq.sum() == n - 1:
                break
        else:
            raise RejectionLimitExceeded(f"no acceptance in {max_attempts} attempts at n={n}")
    seq = rotate(seq, unique_valid_rotation(seq))
    return seq, attempt


def sample_conditioned(
    dist: OffspringDistribution,
    n: int,
    rng,
    max_attempts: int | None = None,
    method: str = "histogram",
) -> Tree:
    seq, _ = draw_conditioned_sequence(dist, n, rng, max_attempts, method)
    return build_tree(seq)


def acceptance_trials(dist: OffspringDistribution, n: int, attempts: int, rng) -> int:
    """Number of accepted attempts (S_n = n-1) out of ``attempts``, via the histogram path."""
    check_size(dist, n)
    gen = as_generator(rng)
    table = _HazardTable.of(dist)
    return sum(_histogram_attempt(table, n, gen) is not None for _ in range(attempts))


def predicted_acceptance_rate(dist: OffspringDistribution, n: int) -> float:
    """Local-limit approximation h / sqrt(2 pi sigma^2 n) * exp(-1 / (2 n sigma^2))."""
    check_size(dist, n)
    s2 = dist.variance
    return dist.span / math.sqrt(2 * math.pi * s2 * n) * math.exp(-1.0 / (2 * n * s2))


@dataclass(frozen=True)
class Overflow:
    """Returned instead of a tree when the branching process exceeds its size cap."""

    size_cap: int
    generations: int


@njit(cache=True)
def _bfs_to_preorder(bfs_degrees):
    n = bfs_degrees.shape[0]
    first_child = np.empty(n, np.int64)
    nxt = 1
    for i in range(n):
        first_child[i] = nxt
        nxt += bfs_degrees[i]
    out = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    top = 0
    stack[0] = 0
    pos = 0
    while top >= 0:
        v = stack[top]
        top -= 1
        out[pos] = bfs_degrees[v]
        pos += 1
        # push children in reverse so the first child pops first
        for c in range(first_child[v] + bfs_degrees[v] - 1, first_child[v] - 1, -1):
            top += 1
            stack[top] = c
    return out


def sample_unconditioned(dist: OffspringDistribution, rng, size_cap: int) -> Tree | Overflow:
    """Run the branching process generation by generation (breadth first)."""
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    gen = as_generator(rng)
    bfs = []
    frontier = 1
    total = 1
    generations = 0
    while frontier:
        kids = dist.draw(gen, frontier)
        bfs.append(kids)
        frontier = int(kids.sum())
        total += frontier
        generations += 1
        if total > size_cap:
            return Overflow(size_cap, generations)
    return build_tree(_bfs_to_preorder(np.concatenate(bfs).astype(np.int64)))
