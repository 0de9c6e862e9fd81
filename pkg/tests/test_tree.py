import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import degree_sequences, trees
from gwburn.errors import BadSum, CapExceeded, InvalidSequence
from gwburn.tree import (
    all_sequences,
    ball,
    build_tree,
    c_k_j,
    c_k_sizes,
    diameter,
    distance,
    distance_matrix,
    enumerate_trees,
    path_tree,
    read_tree,
    rotate,
    star_tree,
    to_lattice_path,
    unique_valid_rotation,
    validate,
    write_tree,
)

FIG2 = (1, 2, 2, 0, 0, 1, 0)


@pytest.mark.parametrize("seq,ok", [(FIG2, True), ((0,), True), ((0, 2, 0), False),
                                    ((2, 0, 0), True), ((1, 1, 0), True), ((1, 0, 0), False), ((), False)])
def test_validate(seq, ok):
    assert validate(seq) is ok


def test_build_figure_two():
    t = build_tree(FIG2)
    # hand decode: 0 -> 1 -> {2 -> {3, 4}, 5 -> {6}}
    assert t.parent.tolist() == [-1, 0, 1, 2, 2, 1, 5]
    assert t.height == 3 and len(t.leaves()) == 3
    assert t.depth.tolist() == [0, 1, 2, 3, 3, 2, 3]


def test_leaf_count_is_number_of_zero_degrees():
    assert len(build_tree(FIG2).leaves()) == FIG2.count(0) == 3


def test_single_and_path():
    t = build_tree((0,))
    assert t.n == 1 and t.height == 0 and t.subtree_height.tolist() == [0]
    p = build_tree((1, 1, 1, 0))
    assert p.height == 3 and p.depth.tolist() == [0, 1, 2, 3]


def test_build_rejects_invalid():
    with pytest.raises(InvalidSequence):
        build_tree((0, 2, 0))


@pytest.mark.parametrize("seq,path", [(FIG2, [0, 0, 1, 2, 1, 0, 0, -1]), ((0,), [0, -1]), ((2, 0, 0), [0, 1, 0, -1])])
def test_lattice_path(seq, path):
    assert to_lattice_path(seq).tolist() == path


def test_rotation_examples():
    assert unique_valid_rotation((0, 2, 0)) == 1
    assert rotate((0, 2, 0), 1).tolist() == [2, 0, 0]
    assert unique_valid_rotation((0,)) == 0
    seq = (0, 0, 1, 2, 2, 0, 1)
    brute = [r for r in range(7) if validate(rotate(seq, r))]
    assert brute == [unique_valid_rotation(seq)] == [2]
    assert rotate(seq, 2).tolist() == [1, 2, 2, 0, 1, 0, 0]


def test_rotation_bad_sum():
    with pytest.raises(BadSum):
        unique_valid_rotation((1, 1))


def test_rotation_exhaustive_small():
    for s in range(1, 9):
        for seq in all_sequences(s, 3):
            if sum(seq) != s - 1:
                continue
            assert [r for r in range(s) if validate(rotate(seq, r))] == [unique_valid_rotation(seq)]


def test_lattice_criterion_equivalence():
    # exhaustive over s <= 8, entries <= 3
    for s in range(1, 9):
        for seq in all_sequences(s, 3):
            y = to_lattice_path(seq)
            assert validate(seq) == bool(y[-1] == -1 and y[:-1].min() > -1)


@pytest.mark.parametrize("s,count", [(1, 1), (2, 1), (3, 2), (4, 5), (5, 14), (8, 429)])
def test_enumeration_counts(s, count):
    seqs = list(enumerate_trees(s))
    assert len(seqs) == len(set(seqs)) == count == math.comb(2 * (s - 1), s - 1) // s
    assert all(validate(q) for q in seqs)


def test_enumeration_s3_and_brute():
    assert list(enumerate_trees(3)) == [(1, 1, 0), (2, 0, 0)]
    for s in range(1, 7):
        brute = [q for q in itertools.product(range(s), repeat=s) if validate(q)]
        assert list(enumerate_trees(s)) == brute


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        next(enumerate_trees(13))


def test_roundtrip_all_small_trees():
    for s in range(1, 11):
        for seq in enumerate_trees(s):
            t = build_tree(seq)
            # re-extract preorder degrees from the child lists by explicit DFS
            out, stack = [], [0]
            while stack:
                v = stack.pop()
                kids = t.children_of(v).tolist()
                out.append(len(kids))
                stack.extend(reversed(kids))
            assert tuple(out) == seq


def test_distance_examples():
    p4 = path_tree(4)
    assert distance(p4, 2, 2) == 0 and distance(p4, 0, 3) == 3
    fig = build_tree(FIG2)
    # leaves 4 (under 2) and 6 (under 5) meet at vertex 1, depth 1
    assert distance(fig, 4, 6) == 4


@pytest.mark.parametrize("tree,v,r,size", [(path_tree(5), 2, 1, 3), (star_tree(5), 0, 1, 6), (path_tree(5), 0, 0, 1)])
def test_ball(tree, v, r, size):
    assert ball(tree, v, r).size == size


def test_ball_full_at_diameter():
    t = build_tree(FIG2)
    assert ball(t, 3, diameter(t)).size == t.n


@pytest.mark.parametrize("tree,d", [(build_tree((0,)), 0), (path_tree(7), 6), (star_tree(4), 2), (build_tree(FIG2), 4)])
def test_diameter(tree, d):
    assert diameter(tree) == d


def test_ckj_examples():
    p7 = path_tree(7)
    assert c_k_j(p7, 2, 0).tolist() == [0, 2, 4]
    assert c_k_j(build_tree((0,)), 1, 0).size == 0
    t = build_tree(FIG2)
    assert c_k_j(t, t.height + 1, 1).size == 0
    with pytest.raises(ValueError):
        c_k_j(p7, 2, 2)


def test_tree_file_roundtrip(tmp_path):
    t = build_tree(FIG2)
    write_tree(t, tmp_path / "t.txt")
    assert (tmp_path / "t.txt").read_text() == "1 2 2 0 0 1 0\n"
    assert read_tree(tmp_path / "t.txt") == t


@given(trees(max_size=60))
@settings(max_examples=150, deadline=None)
def test_tree_invariants(t):
    assert t.depth[0] == 0
    assert (t.depth[1:] == t.depth[t.parent[1:]] + 1).all()
    assert ((t.subtree_height == 0) == (t.degrees == 0)).all()
    # subtree of v is the contiguous preorder range [v, v + size)
    for v in range(t.n):
        kids = t.children_of(v)
        lo, hi = v, v + t.subtree_size[v]
        assert all(lo < c < hi for c in kids)
        if t.n <= 40:
            desc = [u for u in range(t.n) if _is_ancestor(t, v, u)]
            assert desc == list(range(lo, hi))
    assert sum(t.level(i).size for i in range(t.height + 1)) == t.n


def _is_ancestor(t, a, u):
    while u >= 0:
        if u == a:
            return True
        u = t.parent[u]
    return False


@given(trees(max_size=60), st.integers(1, 12))
@settings(max_examples=150, deadline=None)
def test_ckj_partition(t, k):
    sizes = c_k_sizes(t, k)
    assert sizes.sum() == int((t.subtree_height >= k).sum())
    assert [c_k_j(t, k, j).size for j in range(k)] == sizes.tolist()


@given(trees(max_size=40), st.data())
@settings(max_examples=100, deadline=None)
def test_distance_is_tree_metric(t, data):
    u, v, w = (data.draw(st.integers(0, t.n - 1)) for _ in range(3))
    assert distance(t, u, v) == distance(t, v, u)
    assert distance(t, u, w) <= distance(t, u, v) + distance(t, v, w)
    dm = distance_matrix(t)
    assert dm[u, v] == distance(t, u, v)


@given(degree_sequences(max_size=25))
def test_rotation_of_any_shift_recovers_a_tree(seq):
    s = len(seq)
    for shift in range(min(s, 5)):
        rot = rotate(seq, shift)
        fixed = rotate(rot, unique_valid_rotation(rot))
        assert validate(fixed)
        assert fixed.tolist() == list(seq)
