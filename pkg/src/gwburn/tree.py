"""Rooted ordered trees stored as preorder degree sequences.

Vertices are preorder indices 0..n-1 and the root is 0. Because the
vertices are in DFS order, the subtree of v is the index range
``[v, v + size[v])``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import BadSum, CapExceeded, InvalidSequence

MAX_VERTICES = 1 << 24
ENUMERATION_CAP = 12


def validate(degrees: Sequence[int]) -> bool:
    """True iff ``degrees`` is the preorder degree sequence of a tree.

    Partial sums must satisfy d_1 + ... + d_j >= j for j < s, and the
    total must be s - 1.
    """
    s = len(degrees)
    if s == 0:
        return False
    d = np.asarray(degrees, dtype=np.int64)
    if (d < 0).any():
        return False
    partial = np.cumsum(d)
    if partial[-1] != s - 1:
        return False
    return bool((partial[:-1] >= np.arange(1, s)).all())


def to_lattice_path(degrees: Sequence[int]) -> np.ndarray:
    """Heights y_0..y_s of the Lukasiewicz path, y_j = y_{j-1} + d_j - 1."""
    d = np.asarray(degrees, dtype=np.int64)
    return np.concatenate(([0], np.cumsum(d - 1)))


def unique_valid_rotation(degrees: Sequence[int]) -> int:
    """Offset r such that rotating left by r gives a valid tree sequence.

    The rotation starts just after the first step where the lattice path
    attains its global minimum: every later height is at least that
    minimum and every wrapped-around height lies strictly above it.
    """
    s = len(degrees)
    d = np.asarray(degrees, dtype=np.int64)
    if s == 0 or d.sum() != s - 1:
        raise BadSum(f"degree sum {int(d.sum()) if s else 0} != s - 1 = {s - 1}")
    y = np.cumsum(d - 1)  # y_1..y_s
    return (int(np.argmin(y)) + 1) % s


def rotate(degrees: Sequence[int], offset: int) -> np.ndarray:
    return np.roll(np.asarray(degrees, dtype=np.int64), -offset)


@dataclass(frozen=True, eq=False)
class Tree:
    degrees: np.ndarray
    parent: np.ndarray
    depth: np.ndarray
    subtree_height: np.ndarray
    subtree_size: np.ndarray
    child_offsets: np.ndarray
    children: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return int(self.degrees.shape[0])

    @property
    def height(self) -> int:
        return int(self.subtree_height[0])

    def children_of(self, v: int) -> np.ndarray:
        return self.children[self.child_offsets[v]:self.child_offsets[v + 1]]

    def neighbours(self, v: int) -> list[int]:
        out = self.children_of(v).tolist()
        if v > 0:
            out.append(int(self.parent[v]))
        return out

    def level(self, i: int) -> np.ndarray:
        """Vertices at depth i."""
        return np.flatnonzero(self.depth == i)

    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.degrees == 0)

    def to_line(self) -> str:
        return " ".join(map(str, self.degrees.tolist()))

    def __eq__(self, other):
        return isinstance(other, Tree) and np.array_equal(self.degrees, other.degrees)

    def __hash__(self):
        return hash(self.degrees.tobytes())

    def __repr__(self):
        if self.n <= 20:
            return f"Tree({self.to_line()})"
        return f"Tree(n={self.n}, height={self.height})"


def build_tree(degrees: Sequence[int]) -> Tree:
    d = np.ascontiguousarray(degrees, dtype=np.int64)
    if d.ndim != 1 or not validate(d):
        raise InvalidSequence(f"not a preorder degree sequence: {_short(d)}")
    if d.shape[0] > MAX_VERTICES:
        raise CapExceeded(f"tree has {d.shape[0]} vertices, cap is {MAX_VERTICES}")
    parent, depth, height, size = _kernels.tree_arrays(d)
    offsets = np.zeros(d.shape[0] + 1, dtype=np.int64)
    np.cumsum(d, out=offsets[1:])
    # stable sort keeps siblings in preorder
    children = np.argsort(parent[1:], kind="stable").astype(np.int64) + 1
    for arr in (d, parent, depth, height, size, offsets, children):
        arr.setflags(write=False)
    return Tree(d, parent, depth, height, size, offsets, children)


def _short(d) -> str:
    d = list(np.asarray(d).tolist())
    return str(tuple(d)) if len(d) <= 16 else f"({', '.join(map(str, d[:16]))}, ...) len={len(d)}"


def path_tree(n: int) -> Tree:
    """P_n rooted at an endpoint."""
    return build_tree([1] * (n - 1) + [0])


def star_tree(leaves: int) -> Tree:
    return build_tree([leaves] + [0] * leaves)


def distance(tree: Tree, u: int, v: int) -> int:
    depth, parent = tree.depth, tree.parent
    d = 0
    while depth[u] > depth[v]:
        u = parent[u]
        d += 1
    while depth[v] > depth[u]:
        v = parent[v]
        d += 1
    while u != v:
        u, v = parent[u], parent[v]
        d += 2
    return d


def distances_from(tree: Tree, source: int) -> np.ndarray:
    dist = np.full(tree.n, -1, dtype=np.int64)
    queue = np.empty(tree.n, dtype=np.int64)
    _kernels.bfs_distances(tree.child_offsets, tree.children, tree.parent, source, dist, queue)
    return dist


def distance_matrix(tree: Tree) -> np.ndarray:
    return np.stack([distances_from(tree, v) for v in range(tree.n)])


def ball(tree: Tree, v: int, r: int) -> np.ndarray:
    """Sorted vertex indices within distance r of v."""
    return np.flatnonzero(distances_from(tree, v) <= r)


def diameter(tree: Tree) -> int:
    if "diameter" not in tree._cache:
        d0 = distances_from(tree, 0)
        far = int(np.argmax(d0))
        tree._cache["diameter"] = int(distances_from(tree, far).max())
    return tree._cache["diameter"]


def c_k_j(tree: Tree, k: int, j: int) -> np.ndarray:
    """Vertices at depth = j (mod k) whose subtree has height >= k."""
    if k < 1 or not 0 <= j < k:
        raise ValueError(f"need k >= 1 and 0 <= j < k, got k={k}, j={j}")
    mask = (tree.subtree_height >= k) & (tree.depth % k == j)
    return np.flatnonzero(mask)


def c_k_sizes(tree: Tree, k: int) -> np.ndarray:
    """|C_k^j| for every j at once."""
    return _kernels.ckj_counts(tree.depth, tree.subtree_height, k)


def enumerate_trees(s: int, cap: int = ENUMERATION_CAP) -> Iterator[tuple[int, ...]]:
    """Every preorder degree sequence of length s, in lexicographic order."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if s > cap:
        raise CapExceeded(f"enumeration of s={s} exceeds cap {cap}")
    seq = [0] * s

    # height = open slots remaining (lattice height + 1) before position i
    def rec(i: int, open_slots: int) -> Iterator[tuple[int, ...]]:
        remaining = s - i
        if i == s - 1:
            if open_slots == 1:
                seq[i] = 0
                yield tuple(seq)
            return
        # after taking d, slots = open_slots - 1 + d must stay >= 1 and
        # can be at most the number of vertices left to place
        for d in range(0, remaining):
            slots = open_slots - 1 + d
            if slots < 1:
                continue
            if slots > remaining - 1:
                break
            seq[i] = d
            yield from rec(i + 1, slots)

    if s == 1:
        yield (0,)
        return
    yield from rec(0, 1)


def all_sequences(s: int, max_entry: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(max_entry + 1), repeat=s)


def read_tree(path: str | Path) -> Tree:
    text = Path(path).read_text(encoding="utf-8").split()
    try:
        degrees = [int(t) for t in text]
    except ValueError:
        raise InvalidSequence(f"{path}: non-integer token in degree sequence") from None
    return build_tree(degrees)


def write_tree(tree: Tree, path: str | Path) -> None:
    Path(path).write_text(tree.to_line() + "\n", encoding="utf-8")
