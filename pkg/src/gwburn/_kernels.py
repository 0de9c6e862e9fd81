"""Compiled inner loops. Inputs are assumed valid; callers check."""

import numpy as np
from numba import njit

INF = np.int64(1 << 60)


@njit(cache=True)
def tree_arrays(degrees):
    n = degrees.shape[0]
    parent = np.empty(n, np.int64)
    depth = np.zeros(n, np.int64)
    height = np.zeros(n, np.int64)
    size = np.ones(n, np.int64)
    # stack of vertices still owed children, with the count owed
    stack = np.empty(n, np.int64)
    owed = np.empty(n, np.int64)
    top = -1
    parent[0] = -1
    if degrees[0] > 0:
        top = 0
        stack[0] = 0
        owed[0] = degrees[0]
    for v in range(1, n):
        p = stack[top]
        parent[v] = p
        depth[v] = depth[p] + 1
        owed[top] -= 1
        if owed[top] == 0:
            top -= 1
        if degrees[v] > 0:
            top += 1
            stack[top] = v
            owed[top] = degrees[v]
    for v in range(n - 1, 0, -1):
        p = parent[v]
        size[p] += size[v]
        if height[v] + 1 > height[p]:
            height[p] = height[v] + 1
    return parent, depth, height, size


@njit(cache=True)
def greedy_cover(parent, r):
    """Minimum radius-r ball cover of a rooted tree given in preorder.

    Children precede parents in reverse preorder, so one backward sweep
    sees every subtree finished before its root. ``far`` is the distance
    to the farthest still-uncovered vertex below, ``near`` to the nearest
    placed center below.
    """
    n = parent.shape[0]
    far = np.zeros(n, np.int64)
    near = np.full(n, INF, np.int64)
    is_center = np.zeros(n, np.bool_)
    for v in range(n - 1, -1, -1):
        if far[v] >= 0 and far[v] + near[v] <= r:
            far[v] = -1
        if far[v] == r or (v == 0 and far[v] >= 0):
            is_center[v] = True
            near[v] = 0
            far[v] = -1
        if v > 0:
            p = parent[v]
            if far[v] >= 0 and far[v] + 1 > far[p]:
                far[p] = far[v] + 1
            if near[v] + 1 < near[p]:
                near[p] = near[v] + 1
    return np.nonzero(is_center)[0]


@njit(cache=True)
def nearest_center_distance(parent, centers):
    n = parent.shape[0]
    down = np.full(n, INF, np.int64)
    for c in centers:
        down[c] = 0
    for v in range(n - 1, 0, -1):
        p = parent[v]
        if down[v] + 1 < down[p]:
            down[p] = down[v] + 1
    best = down.copy()
    for v in range(1, n):
        p = parent[v]
        if best[p] + 1 < best[v]:
            best[v] = best[p] + 1
    return best


@njit(cache=True)
def bfs_distances(offsets, children, parent, source, dist, queue):
    """Fill ``dist`` (pre-set to -1) with distances from ``source``; returns max."""
    head = 0
    tail = 1
    queue[0] = source
    dist[source] = 0
    far = 0
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        if du > far:
            far = du
        p = parent[u]
        if p >= 0 and dist[p] < 0:
            dist[p] = du + 1
            queue[tail] = p
            tail += 1
        for i in range(offsets[u], offsets[u + 1]):
            c = children[i]
            if dist[c] < 0:
                dist[c] = du + 1
                queue[tail] = c
                tail += 1
    return far


@njit(cache=True)
def distance_histogram(offsets, children, parent):
    """counts[i] = number of unordered pairs at distance i (BFS from every vertex)."""
    n = parent.shape[0]
    counts = np.zeros(n, np.int64)
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    for s in range(n):
        dist[:] = -1
        bfs_distances(offsets, children, parent, s, dist, queue)
        for v in range(s + 1, n):
            counts[dist[v]] += 1
    return counts


@njit(cache=True)
def ckj_counts(depth, height, k):
    """Sizes of C_k^j for j = 0..k-1."""
    out = np.zeros(k, np.int64)
    for v in range(depth.shape[0]):
        if height[v] >= k:
            out[depth[v] % k] += 1
    return out
