"""Burning numbers of trees: simulation, exact search, ball covers and bounds.

b(T) is the least k such that balls of radii k-1, k-2, ..., 0 around some
vertices cover T; bhat(T) is the least k such that k balls of radius k
cover T. bhat <= b <= 2 bhat.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import CapExceeded, SourceAlreadyBurning
from .stats import pair_counts
from .tree import Tree, c_k_j, c_k_sizes, diameter, distance_matrix

DEFAULT_NODE_CAP = 64


@dataclass(frozen=True)
class BurningSchedule:
    sources: tuple[int, ...]

    def __len__(self):
        return len(self.sources)


@dataclass(frozen=True)
class CoverCertificate:
    """Balls of a common radius around ``centers``.

    If it covers the tree, it certifies bhat <= claimed_k, where
    claimed_k >= max(len(centers), radius).
    """

    centers: tuple[int, ...]
    radius: int
    claimed_k: int

    def to_json(self) -> str:
        return json.dumps({"centers": list(self.centers), "radius": self.radius, "k": self.claimed_k})

    @classmethod
    def from_json(cls, text: str) -> "CoverCertificate":
        rec = json.loads(text)
        return cls(tuple(int(c) for c in rec["centers"]), int(rec["radius"]), int(rec["k"]))


@dataclass(frozen=True)
class LowerBoundCertificate:
    """Q_{2k}(T) < n^2/(2k) - n/2, so no k sets of diameter <= 2k partition T."""

    k: int
    q_value: int
    threshold: Fraction
    n: int

    def holds(self) -> bool:
        return self.q_value < self.threshold

    def to_json(self) -> str:
        return json.dumps({
            "k": self.k, "q_value": self.q_value, "n": self.n,
            "threshold": f"{self.threshold.numerator}/{self.threshold.denominator}",
        })


def _spread(tree: Tree, burning: np.ndarray) -> np.ndarray:
    out = burning.copy()
    out[1:] |= burning[tree.parent[1:]]
    out[tree.parent[1:][burning[1:]]] = True
    return out


def simulate_burning(tree: Tree, schedule: BurningSchedule | tuple) -> tuple[int, bool]:
    """Run the burning process with the given fire sources.

    Round t first spreads the fire one step (t > 1) and then ignites
    source t, which must not be burning yet. The process stops in the
    first round in which every vertex burns, even before that round's
    ignition (so b(P_2) = 2 with a single real source); later sources are
    unused. Returns (rounds used, whether the tree burned completely).
    """
    sources = tuple(schedule.sources if isinstance(schedule, BurningSchedule) else schedule)
    n = tree.n
    for s in sources:
        if not 0 <= s < n:
            raise ValueError(f"source {s} is not a vertex of a tree with {n} vertices")
    burning = np.zeros(n, dtype=bool)
    for t, s in enumerate(sources, 1):
        if t > 1:
            burning = _spread(tree, burning)
            if burning.all():
                return t, True
        if burning[s]:
            raise SourceAlreadyBurning(t, s)
        burning[s] = True
        if burning.all():
            return t, True
    return len(sources), False


def covers_with_radii(tree: Tree, sources) -> bool:
    """Whether balls B_{k-1}(v_0), ..., B_0(v_{k-1}) cover the tree."""
    k = len(sources)
    best = np.full(tree.n, False)
    for t, s in enumerate(sources):
        best |= _ball_mask(tree, s, k - 1 - t)
    return bool(best.all())


def _ball_mask(tree, v, r):
    d = _kernels.nearest_center_distance(tree.parent, np.array([v], dtype=np.int64))
    return d <= r


class _CoverSearch:
    """Backtracking search for a cover by balls of distinct radii 0..k-1.

    Branches on the uncovered vertex farthest from the centers chosen so
    far (smallest index on ties); it must lie in one of the remaining
    balls, so try every remaining radius (largest first) and every center
    within that radius of it. Prunes when the best-case coverage of the
    remaining radii cannot reach all uncovered vertices, and memoises
    failed (uncovered, radii) states.
    """

    def __init__(self, tree: Tree):
        self.n = n = tree.n
        self.dist = distance_matrix(tree)
        self.ecc = self.dist.max(axis=1)
        self.full = (1 << n) - 1
        maxr = int(self.ecc.max()) if n > 1 else 0
        self.masks = []
        for r in range(maxr + 1):
            within = self.dist <= r
            self.masks.append([sum(1 << u for u in np.flatnonzero(within[v]).tolist()) for v in range(n)])

    def ball(self, v, r):
        return self.masks[min(r, len(self.masks) - 1)][v]

    def run(self, k: int):
        self.failed = set()
        self.chosen = []
        radii = tuple(range(k - 1, -1, -1))
        if self._rec(self.full, radii):
            return dict((r, c) for c, r in self.chosen)
        return None

    def _pick(self, uncovered):
        best_v, best_key = -1, -1
        verts = [v for v in range(self.n) if uncovered >> v & 1]
        if self.chosen:
            for v in verts:
                key = min(int(self.dist[v, c]) for c, _ in self.chosen)
                if key > best_key:
                    best_v, best_key = v, key
        else:
            for v in verts:
                if self.ecc[v] > best_key:
                    best_v, best_key = v, int(self.ecc[v])
        return best_v

    def _rec(self, uncovered, radii):
        if not uncovered:
            return True
        if not radii:
            return False
        key = (uncovered, radii)
        if key in self.failed:
            return False
        need = uncovered.bit_count()
        cap = 0
        for r in radii:
            cap += max((self.ball(v, r) & uncovered).bit_count() for v in range(self.n))
        if cap < need:
            self.failed.add(key)
            return False
        u = self._pick(uncovered)
        for i, r in enumerate(radii):
            rest = radii[:i] + radii[i + 1:]
            seen = set()
            for c in np.flatnonzero(self.dist[u] <= r).tolist():
                left = uncovered & ~self.ball(c, r)
                if left in seen:
                    continue
                seen.add(left)
                self.chosen.append((c, r))
                if self._rec(left, rest):
                    return True
                self.chosen.pop()
        self.failed.add(key)
        return False


def _legalise(tree: Tree, k: int, assignment: dict) -> BurningSchedule:
    """Turn a radius->center cover into a process-legal schedule.

    A planned source that is already burning is replaced by the smallest
    unburned vertex; the fire that reached it already covers its ball.
    """
    burning = np.zeros(tree.n, dtype=bool)
    sources = []
    for t in range(k):
        if t:
            burning = _spread(tree, burning)
        s = assignment.get(k - 1 - t)
        if s is None or burning[s]:
            free = np.flatnonzero(~burning)
            # everything burns after the final spread: this ignition is moot
            s = int(free[0]) if free.size else (0 if s is None else s)
        sources.append(int(s))
        burning[s] = True
    return BurningSchedule(tuple(sources))


def burning_number_exact(tree: Tree, node_cap: int = DEFAULT_NODE_CAP) -> tuple[int, BurningSchedule]:
    """Exact b(T) with a witness schedule, by iterative deepening over k."""
    if tree.n > node_cap:
        raise CapExceeded(f"exact burning search capped at {node_cap} vertices, tree has {tree.n}")
    if tree.n == 1:
        return 1, BurningSchedule((0,))
    search = _CoverSearch(tree)
    k = 1
    while True:
        assignment = search.run(k)
        if assignment is not None:
            return k, _legalise(tree, k, assignment)
        k += 1


def min_ball_cover(tree: Tree, r: int) -> tuple[int, list[int]]:
    """Fewest radius-r balls covering the tree, with their centers."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    centers = _kernels.greedy_cover(tree.parent, r)
    return int(centers.shape[0]), centers.tolist()


def bhat_exact(tree: Tree) -> tuple[int, CoverCertificate]:
    k = 1
    while True:
        count, centers = min_ball_cover(tree, k)
        if count <= k:
            return k, CoverCertificate(tuple(centers), k, k)
        k += 1


def verify_cover(tree: Tree, cert: CoverCertificate) -> bool:
    if not cert.centers:
        return False
    centers = np.asarray(cert.centers, dtype=np.int64)
    if centers.min() < 0 or centers.max() >= tree.n:
        return False
    d = _kernels.nearest_center_distance(tree.parent, centers)
    return bool((d <= cert.radius).all())


def scheme_cover(tree: Tree, k: int, j: int) -> CoverCertificate:
    """Radius-2k balls around the root and every vertex of C_k^j."""
    centers = sorted(set(c_k_j(tree, k, j).tolist()) | {0})
    return CoverCertificate(tuple(centers), 2 * k, max(len(centers), 2 * k))


def scheme_upper_bound(tree: Tree) -> tuple[int, int, int]:
    """(4k, k, j) for the first k with some |C_k^j| <= 2k - 1."""
    k = 1
    while True:
        sizes = c_k_sizes(tree, k)
        j = int(np.argmin(sizes))
        if sizes[j] <= 2 * k - 1:
            return 4 * k, k, j
        k += 1


def pair_lower_bound(tree: Tree, pair_cap: int | None = None) -> tuple[int, LowerBoundCertificate | None]:
    """Largest k with Q_{2k} < n^2/(2k) - n/2; then bhat >= k + 1."""
    prof = pair_counts(tree) if pair_cap is None else pair_counts(tree, pair_cap)
    n = tree.n
    best = 0
    cert = None
    k = 1
    while True:
        q = prof.q(2 * k)
        # q < n^2/(2k) - n/2  <=>  2kq < n^2 - kn
        if 2 * k * q < n * n - k * n:
            best = k
            cert = LowerBoundCertificate(k, q, Fraction(n * n - k * n, 2 * k), n)
            k += 1
        else:
            return best, cert


@dataclass(frozen=True)
class KnownBounds:
    dfs_cycle: int
    bessy: int
    land_lu: int
    bastide: int

    def as_dict(self) -> dict:
        return asdict(self)

    def min(self) -> int:
        return min(self.dfs_cycle, self.bessy, self.land_lu, self.bastide)


def _ceil_sqrt_frac(num: int, den: int) -> int:
    """ceil(sqrt(num/den)) in exact integer arithmetic."""
    m = math.isqrt(num // den)
    while m * m * den < num:
        m += 1
    while m > 0 and (m - 1) ** 2 * den >= num:
        m -= 1
    return m


def known_bounds(n: int) -> KnownBounds:
    """Closed-form upper bounds on b(T) valid for every tree on n >= 2 vertices."""
    if n < 2:
        raise ValueError("known bounds are stated for n >= 2")
    dfs_cycle = _ceil_sqrt_frac(2 * (n - 1), 1)
    bessy = math.isqrt(12 * n // 7) + 3  # floor(sqrt(12n/7)) since floor(sqrt(floor x)) = floor(sqrt x)
    # smallest m >= 0 with 4m + 3 >= sqrt(24n + 33)
    m = max(0, (math.isqrt(24 * n + 33) - 3) // 4)
    while (4 * m + 3) ** 2 < 24 * n + 33:
        m += 1
    land_lu = m
    bastide = _ceil_sqrt_frac(4 * n, 3) + 1
    return KnownBounds(dfs_cycle, bessy, land_lu, bastide)


def tree_bounds(tree: Tree) -> dict:
    """Every cheap bound for one tree (no exact search)."""
    bhat, _ = bhat_exact(tree)
    scheme, k, j = scheme_upper_bound(tree)
    return {"bhat": bhat, "scheme_bound": scheme, "scheme_k": k, "scheme_j": j,
            "height": tree.height, "diameter": diameter(tree)}
