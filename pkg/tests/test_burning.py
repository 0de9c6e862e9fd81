import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import trees
from gwburn.burning import (
    BurningSchedule,
    CoverCertificate,
    LowerBoundCertificate,
    bhat_exact,
    burning_number_exact,
    covers_with_radii,
    known_bounds,
    min_ball_cover,
    pair_lower_bound,
    scheme_cover,
    scheme_upper_bound,
    simulate_burning,
    verify_cover,
)
from gwburn.errors import CapExceeded, SourceAlreadyBurning
from gwburn.oracles import brute_bhat, brute_burning_number, brute_min_cover, radius_cover_exists
from gwburn.sampler import RandomStream, sample_conditioned
from gwburn.tree import build_tree, diameter, enumerate_trees, path_tree, star_tree

SINGLE = build_tree((0,))


def all_trees(s_max):
    for s in range(1, s_max + 1):
        for seq in enumerate_trees(s):
            yield build_tree(seq)


# simulation

def test_simulate_single_vertex():
    assert simulate_burning(SINGLE, (0,)) == (1, True)


def test_simulate_path9():
    # 0-based path vertices: fires at 2, 6, 8 burn P_9 in three rounds
    assert simulate_burning(path_tree(9), BurningSchedule((2, 6, 8))) == (3, True)


def test_simulate_path9_any_two_sources_fail():
    p9 = path_tree(9)
    for a in range(9):
        for b in range(9):
            try:
                assert simulate_burning(p9, (a, b))[1] is False
            except SourceAlreadyBurning:
                pass


def test_simulate_rejects_burning_source():
    with pytest.raises(SourceAlreadyBurning):
        simulate_burning(path_tree(5), (2, 3))
    with pytest.raises(ValueError):
        simulate_burning(path_tree(3), (7,))


def test_simulate_stops_when_burned():
    # P_2: after one spread everything burns, the second source is never lit
    assert simulate_burning(path_tree(2), (0, 1)) == (2, True)


# exact burning number

@pytest.mark.parametrize("n", range(1, 65))
def test_path_burning_number(n):
    assert burning_number_exact(path_tree(n))[0] == math.isqrt(n - 1) + 1


def test_exact_examples():
    assert burning_number_exact(SINGLE)[0] == 1
    b, sched = burning_number_exact(star_tree(5))
    assert b == 2 and simulate_burning(star_tree(5), sched) == (2, True)


def test_exact_node_cap():
    with pytest.raises(CapExceeded):
        burning_number_exact(path_tree(70), node_cap=64)


def test_exact_matches_brute_force():
    for t in all_trees(8):
        b, sched = burning_number_exact(t)
        assert b == brute_burning_number(t)
        assert len(sched) == b
        assert simulate_burning(t, sched) == (b, True)


@pytest.mark.slow
def test_witness_is_tight_up_to_ten():
    for t in all_trees(10):
        b, sched = burning_number_exact(t)
        assert simulate_burning(t, sched)[1]
        assert covers_with_radii(t, sched.sources)
        assert not radius_cover_exists(t, b - 1)


# ball covers

@pytest.mark.parametrize("tree,r,count", [(path_tree(5), 1, 2), (star_tree(5), 0, 6), (path_tree(9), 8, 1)])
def test_min_ball_cover_examples(tree, r, count):
    c, centers = min_ball_cover(tree, r)
    assert c == count == len(centers)
    assert verify_cover(tree, CoverCertificate(tuple(centers), r, c))


def test_min_ball_cover_at_diameter():
    for t in all_trees(7):
        assert min_ball_cover(t, diameter(t))[0] == 1


def test_greedy_matches_brute_force():
    for t in all_trees(8):
        for r in range(4):
            assert min_ball_cover(t, r)[0] == brute_min_cover(t, r)


def test_bhat_examples():
    k, cert = bhat_exact(path_tree(9))
    assert k == 2 and verify_cover(path_tree(9), cert)
    assert bhat_exact(SINGLE)[0] == 1


def test_bhat_matches_brute_force():
    for t in all_trees(8):
        assert bhat_exact(t)[0] == brute_bhat(t)


# covering scheme

def test_scheme_cover_examples():
    c = scheme_cover(SINGLE, 1, 0)
    assert c.centers == (0,) and c.radius == 2 and verify_cover(SINGLE, c)
    p7 = path_tree(7)
    c = scheme_cover(p7, 2, 0)
    assert c.centers == (0, 2, 4) and c.radius == 4 and verify_cover(p7, c)


def test_scheme_upper_bound_examples():
    assert scheme_upper_bound(SINGLE) == (4, 1, 0)
    bound, _, _ = scheme_upper_bound(path_tree(9))
    assert bound >= burning_number_exact(path_tree(9))[0]


@given(trees(max_size=80))
@settings(max_examples=100, deadline=None)
def test_scheme_cover_always_covers(t):
    for k in range(1, 6):
        for j in range(k):
            assert verify_cover(t, scheme_cover(t, k, j))


# pair lower bound

def test_pair_lower_bound_examples():
    assert pair_lower_bound(SINGLE) == (0, None)
    p100 = path_tree(100)
    k, cert = pair_lower_bound(p100)
    assert cert is not None and cert.holds() and cert.k == k
    assert k + 1 <= bhat_exact(p100)[0]


def test_pair_lower_bound_sound_up_to_ten():
    for t in all_trees(10):
        assert pair_lower_bound(t)[0] + 1 <= bhat_exact(t)[0]


def test_lower_bound_certificate_json():
    cert = LowerBoundCertificate(3, 10, Fraction(7, 2), 5)
    rec = json.loads(cert.to_json())
    assert rec == {"k": 3, "q_value": 10, "n": 5, "threshold": "7/2"}
    assert not cert.holds()


# known bounds

def test_known_bounds_values():
    assert known_bounds(2).dfs_cycle == 2
    kb = known_bounds(100)
    assert (kb.dfs_cycle, kb.land_lu, kb.bastide) == (15, 12, 13)
    assert kb.bessy == math.floor(math.sqrt(1200 / 7) + 3)
    with pytest.raises(ValueError):
        known_bounds(1)


def test_known_bounds_match_float_formulas():
    for n in range(2, 3000):
        kb = known_bounds(n)
        assert kb.dfs_cycle == math.ceil(math.sqrt(2 * (n - 1)) - 1e-12)
        assert kb.land_lu == math.ceil((math.sqrt(24 * n + 33) - 3) / 4 - 1e-12)
        assert kb.bastide == math.ceil(math.sqrt(4 * n / 3) - 1e-12) + 1


# certificates

def test_verify_cover_examples():
    p5 = path_tree(5)
    assert verify_cover(p5, CoverCertificate(tuple(range(5)), 0, 5))
    assert verify_cover(p5, CoverCertificate((0,), p5.height, 4))
    assert not verify_cover(p5, CoverCertificate((4,), 1, 1))
    assert not verify_cover(p5, CoverCertificate((), 9, 0))
    assert not verify_cover(p5, CoverCertificate((9,), 9, 1))


def test_cover_certificate_json_roundtrip():
    c = CoverCertificate((0, 3, 7), 2, 3)
    assert json.loads(c.to_json()) == {"centers": [0, 3, 7], "radius": 2, "k": 3}
    assert CoverCertificate.from_json(c.to_json()) == c


# orderings

def test_sandwich_on_sampled_trees(poisson):
    rng = RandomStream(17).generator()
    for i in range(200):
        t = sample_conditioned(poisson, 5 + i % 36, rng)
        bh = bhat_exact(t)[0]
        b = burning_number_exact(t)[0]
        assert pair_lower_bound(t)[0] + 1 <= bh <= b <= 2 * bh
        assert b <= scheme_upper_bound(t)[0]
        assert b <= known_bounds(t.n).min()


@given(trees(max_size=30))
@settings(max_examples=60, deadline=None)
def test_sandwich_property(t):
    bh = bhat_exact(t)[0]
    b, sched = burning_number_exact(t)
    assert bh <= b <= 2 * bh
    assert simulate_burning(t, sched) == (b, True)


@pytest.mark.slow
def test_conjecture_holds_up_to_twelve():
    # b(T) <= ceil(sqrt(n)) for all trees with at most 12 vertices
    worst = []
    for t in all_trees(12):
        if t.n > 1 and burning_number_exact(t)[0] > math.isqrt(t.n - 1) + 1:
            worst.append(t.to_line())
    if worst:
        pytest.xfail(f"counterexample to the burning conjecture: {worst[0]}")
