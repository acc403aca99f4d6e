"""Numba kernels for the sequential O(n) passes.

Everything here is a plain integer loop over parent pointers; the parent of a
vertex always has a smaller label, so a single ascending sweep suffices.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def accumulate_chunk(parents, v_start, depth, child_count, height_so_far):
    """Fold one block of freshly drawn parents into depth/child-count arrays.

    ``parents[i]`` is the parent of vertex ``v_start + i``.  Returns the
    running height.  Parents may point into the same block; labels within a
    block are processed in increasing order so their depths already exist.
    """
    h = height_so_far
    for i in range(parents.shape[0]):
        p = parents[i]
        d = depth[p] + 1
        depth[v_start + i] = d
        if d > h:
            h = d
        child_count[p] += 1
    return h


@numba.njit(cache=True, nogil=True)
def subtree_sizes(parent, out):
    """Number of descendants (incl. self) per vertex, by a descending sweep."""
    n = out.shape[0] - 1
    for v in range(1, n + 1):
        out[v] = 1
    for v in range(n, 1, -1):
        out[parent[v]] += out[v]


@numba.njit(cache=True, nogil=True)
def distances_to_marked(parent, marked, out):
    """Graph distance from each vertex to the nearest marked ancestor.

    Every vertex's unique path toward the root meets the marked set provided
    the root is marked; dist(v) = 0 on the set, else dist(parent) + 1.
    """
    n = out.shape[0] - 1
    out[1] = 0 if marked[1] else -1
    for v in range(2, n + 1):
        if marked[v]:
            out[v] = 0
        else:
            out[v] = out[parent[v]] + 1


@numba.njit(cache=True, nogil=True, inline="always")
def _splitmix64_next(state):
    state = (state + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = state
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    return state, z ^ (z >> np.uint64(31))


@numba.njit(cache=True, nogil=True, inline="always")
def _bounded_uint(state, width):
    """Unbiased draw from {0, ..., width-1} by bitmask rejection."""
    w = np.uint64(width)
    if w <= np.uint64(1):
        return state, np.uint64(0)
    # smallest mask of the form 2**b - 1 covering width - 1
    mask = np.uint64(1)
    while mask < w - np.uint64(1):
        mask = (mask << np.uint64(1)) | np.uint64(1)
    while True:
        state, z = _splitmix64_next(state)
        r = z & mask
        if r < w:
            return state, r


@numba.njit(cache=True, nogil=True)
def simulate_chain_kernel(n, beta, seed, stop_label, idealized, out):
    """Ancestor-label chain without the tree.

    From label l the chain jumps down inside one attachment window:
    idealized=True uses the window {l-1, ..., l - floor(l**beta)};
    otherwise the jump reproduces the tree's parent law for vertex l, uniform
    on {max(1, (l-1) - floor((l-1)**beta)), ..., l-1}.  Labels are written to
    ``out`` (slot 0 = n); returns the number of labels written.
    """
    state = np.uint64(seed)
    l = n
    count = 1
    out[0] = l
    while l > stop_label and count < out.shape[0]:
        if idealized:
            w = int(l ** beta)
            if w < 1:
                w = 1
            state, r = _bounded_uint(state, w)
            l = l - 1 - int(r)
            if l < 0:
                l = 0
        else:
            lo = (l - 1) - int((l - 1) ** beta)
            if lo < 1:
                lo = 1
            width = l - lo
            if width < 1:
                width = 1
            state, r = _bounded_uint(state, width)
            l = l - 1 - int(r)
        out[count] = l
        count += 1
    return count
