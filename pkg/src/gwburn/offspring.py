"""Critical offspring distributions for Galton-Watson trees.

Every distribution here has mean exactly 1 and finite positive variance.
Builtins sample through numpy's closed-form generators; user-supplied
finite pmfs sample by table lookup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import InvalidParameter

PMF_TOL = 1e-12
MEAN_TOL = 1e-9
POISSON_TAIL_CUTOFF = 1e-12

BUILTIN_KINDS = ("poisson1", "geometric_half", "binomial_d", "two_point")


@dataclass(frozen=True)
class OffspringDistribution:
    """A critical offspring law.

    ``values``/``probs`` tabulate the pmf. For ``poisson1`` the table is
    truncated at tail mass 1e-12 and renormalised, and is used for
    reporting only; sampling never reads it.
    """

    name: str
    kind: str
    values: tuple[int, ...]
    probs: tuple[float, ...]
    mean: float
    variance: float
    span: int
    param: int | None = None
    _hazards: tuple[float, ...] = field(default=(), repr=False, compare=False)

    @property
    def pmf(self) -> dict[int, float]:
        return dict(zip(self.values, self.probs))

    @property
    def finite_support(self) -> bool:
        return self.kind not in ("poisson1", "geometric_half")

    def prob(self, value: int) -> float:
        """Exact P(xi = value), not the truncated table."""
        if value < 0:
            return 0.0
        if self.kind == "poisson1":
            return math.exp(-1.0 - math.lgamma(value + 1))
        if self.kind == "geometric_half":
            return 0.5 ** (value + 1)
        return self.pmf.get(value, 0.0)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """``size`` i.i.d. draws as an int64 array."""
        if self.kind == "poisson1":
            return rng.poisson(1.0, size)
        if self.kind == "geometric_half":
            # numpy's geometric counts trials, support starts at 1
            return rng.geometric(0.5, size) - 1
        if self.kind == "binomial_d":
            return rng.binomial(self.param, 1.0 / self.param, size)
        if self.kind == "two_point":
            return self.param * rng.integers(0, 2, size)
        return rng.choice(np.asarray(self.values), size=size, p=np.asarray(self.probs))

    def sum_of(self, rng: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        """Vectorised sums: entry i is a sum of ``counts[i]`` i.i.d. copies of xi.

        Closed-form convolutions for builtins; custom laws fall back to a
        multinomial over the support.
        """
        counts = np.asarray(counts, dtype=np.int64)
        if self.kind == "poisson1":
            return rng.poisson(counts.astype(np.float64))
        if self.kind == "geometric_half":
            out = np.zeros_like(counts)
            pos = counts > 0
            out[pos] = rng.negative_binomial(counts[pos], 0.5)
            return out
        if self.kind == "binomial_d":
            return rng.binomial(counts * self.param, 1.0 / self.param)
        if self.kind == "two_point":
            return self.param * rng.binomial(counts, 0.5)
        vals = np.asarray(self.values, dtype=np.int64)
        hist = rng.multinomial(counts, np.asarray(self.probs))
        return hist @ vals

    def hazard(self, value: int) -> float:
        """P(xi = value | xi >= value), the step used by the histogram sampler."""
        if self.kind == "geometric_half":
            return 0.5
        if self.kind == "poisson1":
            # p_v / sum_{u>=v} p_u = 1 / sum_j prod_{i=1..j} 1/(v+i)
            total, term, j = 1.0, 1.0, 1
            while term > 1e-18:
                term /= value + j
                total += term
                j += 1
            return 1.0 / total
        try:
            return self._hazards[self.values.index(value)]
        except ValueError:
            return 0.0

    def support_values(self):
        """Iterate the support in increasing order (unbounded for Poisson)."""
        if self.finite_support:
            yield from self.values
            return
        v = 0
        while True:
            yield v
            v += 1


def span_of(values, probs) -> int:
    positive = [v for v, p in zip(values, probs) if v >= 1 and p > 0]
    if not positive:
        raise InvalidParameter("offspring law has no positive support value")
    return reduce(math.gcd, positive)


def span(dist: OffspringDistribution) -> int:
    return dist.span


def _finite(name, kind, values, probs, param=None) -> OffspringDistribution:
    values = tuple(int(v) for v in values)
    probs = tuple(float(p) for p in probs)
    _validate(values, probs)
    mean = math.fsum(v * p for v, p in zip(values, probs))
    var = math.fsum((v - mean) ** 2 * p for v, p in zip(values, probs))
    tails = np.cumsum(np.asarray(probs)[::-1])[::-1]
    hazards = tuple(min(1.0, p / t) if t > 0 else 1.0 for p, t in zip(probs, tails))
    hazards = hazards[:-1] + (1.0,)
    return OffspringDistribution(
        name=name, kind=kind, values=values, probs=probs, mean=mean,
        variance=var, span=span_of(values, probs), param=param, _hazards=hazards,
    )


def _validate(values, probs) -> None:
    if len(values) != len(probs) or not values:
        raise InvalidParameter("pmf must list at least one value with a probability")
    if any(v < 0 for v in values):
        raise InvalidParameter("offspring values must be non-negative")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidParameter("pmf values must be strictly increasing")
    if any(p < 0 for p in probs):
        raise InvalidParameter("probabilities must be non-negative")
    total = math.fsum(probs)
    if abs(total - 1.0) > PMF_TOL:
        raise InvalidParameter(f"probabilities sum to {total!r}, not 1")
    mean = math.fsum(v * p for v, p in zip(values, probs))
    if abs(mean - 1.0) > MEAN_TOL:
        raise InvalidParameter(f"offspring mean is {mean!r}; only critical laws (mean 1) are supported")
    var = math.fsum((v - mean) ** 2 * p for v, p in zip(values, probs))
    if not var > 0:
        raise InvalidParameter("offspring variance must be positive")
    if dict(zip(values, probs)).get(0, 0.0) <= 0:
        raise InvalidParameter("P(xi = 0) must be positive")


def _poisson_table() -> tuple[tuple[int, ...], tuple[float, ...]]:
    probs = []
    v = 0
    while True:
        probs.append(math.exp(-1.0 - math.lgamma(v + 1)))
        tail = 1.0 - math.fsum(probs)
        if tail < POISSON_TAIL_CUTOFF:
            break
        v += 1
    total = math.fsum(probs)
    return tuple(range(len(probs))), tuple(p / total for p in probs)


def make_builtin(kind: str, param: int | None = None) -> OffspringDistribution:
    """Build one of the four builtin laws.

    ``poisson1`` gives Cayley trees, ``geometric_half`` plane trees,
    ``binomial_d`` (param d >= 2) d-ary trees and ``two_point`` (param m >= 2)
    the law on {0, m} with P(m) = 1/m.
    """
    if kind == "poisson1":
        values, probs = _poisson_table()
        return OffspringDistribution(
            name="poisson1", kind=kind, values=values, probs=probs,
            mean=1.0, variance=1.0, span=1,
        )
    if kind == "geometric_half":
        # table for reporting; sampling and prob() use the closed form
        probs = []
        v = 0
        while 0.5 ** (v + 1) >= POISSON_TAIL_CUTOFF:
            probs.append(0.5 ** (v + 1))
            v += 1
        total = math.fsum(probs)
        return OffspringDistribution(
            name="geometric_half", kind=kind, values=tuple(range(len(probs))),
            probs=tuple(p / total for p in probs), mean=1.0, variance=2.0, span=1,
        )
    if kind == "binomial_d":
        d = 2 if param is None else param
        if int(d) != d or d < 2:
            raise InvalidParameter(f"binomial_d needs an integer d >= 2, got {param!r}")
        d = int(d)
        p = 1.0 / d
        probs = [math.comb(d, i) * p**i * (1 - p) ** (d - i) for i in range(d + 1)]
        total = math.fsum(probs)
        return _finite(f"binomial_{d}", kind, range(d + 1), [q / total for q in probs], param=d)
    if kind == "two_point":
        m = 2 if param is None else param
        if int(m) != m or m < 2:
            raise InvalidParameter(f"two_point needs an integer m >= 2, got {param!r}")
        m = int(m)
        return _finite(f"two_point_{m}", kind, (0, m), (1 - 1 / m, 1 / m), param=m)
    raise InvalidParameter(f"unknown builtin offspring kind {kind!r}; expected one of {BUILTIN_KINDS}")


def from_pmf(values, probs, name: str = "custom") -> OffspringDistribution:
    """Custom finite law. Mean must already be 1; nothing is renormalised or tilted."""
    return _finite(name, "custom", values, probs)


def parse_pmf_text(text: str) -> tuple[list[int], list[float]]:
    values, probs = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidParameter(f"line {lineno}: expected 'value probability', got {raw!r}")
        try:
            v = int(parts[0])
            p = float(parts[1])
        except ValueError as exc:
            raise InvalidParameter(f"line {lineno}: {exc}") from None
        values.append(v)
        probs.append(p)
    return values, probs


def load_pmf(path: str | Path) -> OffspringDistribution:
    path = Path(path)
    values, probs = parse_pmf_text(path.read_text(encoding="utf-8"))
    return from_pmf(values, probs, name=f"custom:{path.name}")


def parse_offspring(spec: str) -> OffspringDistribution:
    """Parse CLI strings: poisson, geometric, binomial:d, two_point:m, custom:FILE."""
    head, _, arg = spec.partition(":")
    head = head.strip().lower()
    if head in ("poisson", "poisson1"):
        return make_builtin("poisson1")
    if head in ("geometric", "geometric_half"):
        return make_builtin("geometric_half")
    if head in ("binomial", "binomial_d"):
        return make_builtin("binomial_d", _int_arg(spec, arg, default=2))
    if head == "two_point":
        return make_builtin("two_point", _int_arg(spec, arg, default=2))
    if head == "custom":
        if not arg:
            raise InvalidParameter("custom offspring needs a file: custom:PATH")
        try:
            return load_pmf(arg)
        except OSError as exc:
            raise InvalidParameter(f"cannot read pmf file {arg!r}: {exc}") from None
    raise InvalidParameter(f"unknown offspring spec {spec!r}")


def _int_arg(spec, arg, default):
    if not arg:
        return default
    try:
        return int(arg)
    except ValueError:
        raise InvalidParameter(f"bad integer parameter in {spec!r}") from None


def sample_offspring(dist: OffspringDistribution, rng: np.random.Generator) -> int:
    return int(dist.draw(rng, 1)[0])
