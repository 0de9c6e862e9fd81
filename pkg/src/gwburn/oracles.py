"""Brute-force references for small trees.

These deliberately share nothing with the solvers they check beyond the
tree arrays: distances come from parent-climbing, covers from plain
subset enumeration.
"""

from __future__ import annotations

import itertools

from .tree import Tree, distance


def ball_masks(tree: Tree, radius: int) -> list[int]:
    n = tree.n
    return [sum(1 << u for u in range(n) if distance(tree, v, u) <= radius) for v in range(n)]


def brute_min_cover(tree: Tree, radius: int) -> int:
    """Fewest radius-``radius`` balls covering the tree, by subset enumeration."""
    n = tree.n
    full = (1 << n) - 1
    masks = ball_masks(tree, radius)
    for m in range(1, n + 1):
        for combo in itertools.combinations(masks, m):
            acc = 0
            for b in combo:
                acc |= b
            if acc == full:
                return m
    raise AssertionError("the all-vertices cover always works")


def brute_bhat(tree: Tree) -> int:
    k = 1
    while brute_min_cover(tree, k) > k:
        k += 1
    return k


def radius_cover_exists(tree: Tree, k: int) -> bool:
    """Do balls of radii k-1, ..., 0 around some k vertices (repeats allowed) cover?"""
    if k <= 0:
        return False
    n = tree.n
    full = (1 << n) - 1
    per_radius = [ball_masks(tree, r) for r in range(k - 1, -1, -1)]

    def rec(i, acc):
        if acc == full:
            return True
        if i == k:
            return False
        return any(rec(i + 1, acc | m) for m in set(per_radius[i]))

    return rec(0, 0)


def brute_burning_number(tree: Tree) -> int:
    k = 1
    while not radius_cover_exists(tree, k):
        k += 1
    return k


def plane_tree_count(s: int) -> int:
    """Catalan(s - 1)."""
    from math import comb

    return comb(2 * (s - 1), s - 1) // s
