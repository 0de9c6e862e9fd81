import math
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

from gwburn.errors import IncompatibleSize, RejectionLimitExceeded
from gwburn.offspring import make_builtin
from gwburn.sampler import (
    Overflow,
    RandomStream,
    acceptance_trials,
    draw_conditioned_sequence,
    predicted_acceptance_rate,
    sample_conditioned,
    sample_unconditioned,
)
from gwburn.tree import enumerate_trees, validate


def _freqs(dist, n, draws, seed, method="histogram"):
    rng = RandomStream(seed).generator()
    return Counter(tuple(draw_conditioned_sequence(dist, n, rng, method=method)[0].tolist()) for _ in range(draws))


def test_single_vertex(poisson):
    seq, attempts = draw_conditioned_sequence(poisson, 1, RandomStream(0))
    assert seq.tolist() == [0] and attempts == 1
    assert sample_conditioned(poisson, 1, RandomStream(0)).n == 1


def test_geometric_n3_is_uniform(geometric):
    # geometric(1/2) weights every plane tree of a given size equally
    c = _freqs(geometric, 3, 20_000, 1)
    assert set(c) == {(1, 1, 0), (2, 0, 0)}
    z = (c[(1, 1, 0)] - 10_000) / math.sqrt(20_000 / 4)
    assert abs(z) < 4


def test_poisson_n3_weights(poisson):
    # weights p1^2 p0 = e^-3 and p2 p0^2 = e^-3 / 2
    c = _freqs(poisson, 3, 20_000, 2)
    p = 2 / 3
    z = (c[(1, 1, 0)] - 20_000 * p) / math.sqrt(20_000 * p * (1 - p))
    assert abs(z) < 4


def test_incompatible_size(two_point):
    with pytest.raises(IncompatibleSize):
        draw_conditioned_sequence(two_point, 4, RandomStream(0))
    with pytest.raises(IncompatibleSize):
        draw_conditioned_sequence(two_point, 0, RandomStream(0))


def test_rejection_limit(poisson):
    with pytest.raises(RejectionLimitExceeded):
        draw_conditioned_sequence(poisson, 10**6, RandomStream(0), max_attempts=1)


def test_unknown_method(poisson):
    with pytest.raises(ValueError):
        draw_conditioned_sequence(poisson, 5, RandomStream(0), method="magic")


@pytest.mark.parametrize("method", ["histogram", "iid"])
def test_determinism(poisson, method):
    a = draw_conditioned_sequence(poisson, 500, RandomStream(9, 3, (500,)), method=method)
    b = draw_conditioned_sequence(poisson, 500, RandomStream(9, 3, (500,)), method=method)
    assert a[0].tolist() == b[0].tolist() and a[1] == b[1]
    c = draw_conditioned_sequence(poisson, 500, RandomStream(9, 4, (500,)), method=method)
    assert c[0].tolist() != a[0].tolist()


@pytest.mark.parametrize("name", ["poisson1", "geometric_half", "two_point"])
def test_methods_agree_in_law(name):
    d = make_builtin(name, 2 if name == "two_point" else None)
    n = 5
    trees = list(enumerate_trees(n))
    a = _freqs(d, n, 6000, 3, "histogram")
    b = _freqs(d, n, 6000, 4, "iid")
    table = np.array([[a[t] for t in trees], [b[t] for t in trees]])
    table = table[:, table.sum(axis=0) > 0]
    assert sps.chi2_contingency(table)[1] > 1e-4


@pytest.mark.parametrize("name,n", [("poisson1", 50), ("geometric_half", 200), ("two_point", 101), ("binomial_d", 77)])
def test_samples_are_valid(name, n):
    d = make_builtin(name, 3 if name == "binomial_d" else 2 if name == "two_point" else None)
    rng = RandomStream(5).generator()
    for _ in range(20):
        t = sample_conditioned(d, n, rng)
        assert t.n == n and validate(t.degrees)
        if d.finite_support:
            assert set(t.degrees.tolist()) <= set(d.support_values())


def test_predicted_acceptance_values(poisson, geometric, two_point):
    assert predicted_acceptance_rate(poisson, 10**4) == pytest.approx(3.989e-3, rel=1e-3)
    assert predicted_acceptance_rate(geometric, 10**4) == pytest.approx(2.821e-3, rel=1e-3)
    # span 2 doubles the local mass on the lattice
    assert predicted_acceptance_rate(two_point, 10**4 + 1) == pytest.approx(
        2 * predicted_acceptance_rate(poisson, 10**4 + 1), rel=1e-9)


def test_acceptance_rate_matches_prediction(poisson):
    n, attempts = 10**4, 40_000
    hits = acceptance_trials(poisson, n, attempts, RandomStream(6))
    p = predicted_acceptance_rate(poisson, n)
    se = math.sqrt(p * (1 - p) / attempts)
    assert abs(hits / attempts - p) <= 5 * se


def test_unconditioned_single_vertex_mass(poisson):
    rng = RandomStream(7).generator()
    trials = 20_000
    outs = [sample_unconditioned(poisson, rng, 10**4) for _ in range(trials)]
    singles = sum(not isinstance(t, Overflow) and t.n == 1 for t in outs)
    p = math.exp(-1)
    assert abs(singles / trials - p) <= 5 * math.sqrt(p * (1 - p) / trials)


def test_unconditioned_two_point_sizes_are_odd(two_point):
    rng = RandomStream(8).generator()
    for _ in range(300):
        t = sample_unconditioned(two_point, rng, 10**4)
        if not isinstance(t, Overflow):
            assert t.n % 2 == 1 and validate(t.degrees)


def test_unconditioned_overflow(geometric):
    rng = RandomStream(9).generator()
    results = [sample_unconditioned(geometric, rng, 1) for _ in range(50)]
    # a root with children already exceeds a cap of one vertex
    assert any(isinstance(r, Overflow) for r in results)
    assert all(r.n == 1 for r in results if not isinstance(r, Overflow))
    with pytest.raises(ValueError):
        sample_unconditioned(geometric, rng, 0)
