"""Tree growth under a memory schedule.

Vertices are labelled 1..n with 1 the root.  Vertex m+1 picks its parent

* uniformly from the inclusive window {window_lo(m), ..., m} for windowed
  schedules (unbiased bounded sampling, never modulo reduction), or
* as max(1, floor(m * V_m)) with V_m = quantile(U_m) for SARRT schedules.

Parents are drawn in fixed-size blocks from a single PCG64 stream, so
``grow_tree`` and ``grow_streaming`` see the identical stream and produce
bit-identical trees for the same (schedule, n, seed).  Construction is
strictly sequential per replication; grown trees are immutable and safe for
concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from ._kernels import accumulate_chunk
from .schedules import MemorySchedule, Sarrt, window

_BLOCK = 1 << 20


def _parent_dtype(n: int):
    # invisible in outputs: numpy promotes to Python ints / int64 downstream
    return np.int32 if n < 2**31 else np.int64


@dataclass(frozen=True)
class Tree:
    """Immutable grown tree in parent-array form.

    ``parent[v]`` is the parent label of vertex v for v = 2..n; slots 0 and 1
    are sentinels (the root has no parent).
    """

    n: int
    parent: np.ndarray
    schedule: MemorySchedule | None
    seed: int | None

    def __post_init__(self):
        self.parent.flags.writeable = False

    def parent_of(self, v: int) -> int | None:
        if not 1 <= v <= self.n:
            raise ValueError(f"label {v} outside 1..{self.n}")
        return None if v == 1 else int(self.parent[v])


@dataclass
class GrowthSummary:
    """Online statistics of one grown tree."""

    n: int
    height: int
    degree_histogram: dict[int, int]
    seed: int
    depth: np.ndarray | None = None
    parent: np.ndarray | None = None
    schedule: MemorySchedule | None = field(default=None, repr=False)

    def tree(self) -> Tree:
        if self.parent is None:
            raise ValueError("parent array was not collected")
        return Tree(self.n, self.parent, self.schedule, self.seed)


def _draw_parents_block(schedule, m_block, gen):
    """Parents of vertices m+1 for one ascending block of m values."""
    if isinstance(schedule, Sarrt):
        u = gen.random(m_block.shape[0])
        v = np.asarray(schedule.quantile(u), dtype=np.float64)
        par = np.floor(m_block.astype(np.float64) * v).astype(np.int64)
        return np.maximum(par, 1)
    lo = schedule.lo_block(m_block)
    return gen.integers(lo, m_block, endpoint=True)


def grow_streaming(
    schedule: MemorySchedule,
    n: int,
    seed: int,
    collect: frozenset[str] | set[str] = frozenset(),
) -> GrowthSummary:
    """Grow a tree of n vertices, folding statistics in as parents are drawn.

    ``collect`` may contain "depth" and/or "parents" to retain those arrays;
    otherwise only O(n) integers for depth/degree bookkeeping are held and the
    parent blocks are discarded as soon as they are folded in.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    collect = frozenset(collect)
    unknown = collect - {"depth", "parents"}
    if unknown:
        raise ValueError(f"unknown collect flags: {sorted(unknown)}")

    gen = _rng.stream(seed)
    if not isinstance(schedule, Sarrt):
        schedule.prepare(max(n - 1, 1))

    depth = np.zeros(n + 1, dtype=np.int32)
    child_count = np.zeros(n + 1, dtype=np.int32)
    parents_full = np.zeros(n + 1, dtype=_parent_dtype(n)) if "parents" in collect else None

    height = 0
    for start in range(1, n, _BLOCK):
        m_block = np.arange(start, min(start + _BLOCK, n), dtype=np.int64)
        par = _draw_parents_block(schedule, m_block, gen)
        height = accumulate_chunk(par, start + 1, depth, child_count, height)
        if parents_full is not None:
            parents_full[start + 1 : start + 1 + par.shape[0]] = par

    degree = child_count[1:].astype(np.int64)
    degree[1:] += 1  # non-root vertices carry the edge to their parent
    counts = np.bincount(degree)
    histogram = {int(k): int(c) for k, c in enumerate(counts) if c}

    return GrowthSummary(
        n=n,
        height=int(height),
        degree_histogram=histogram,
        seed=int(seed),
        depth=depth if "depth" in collect else None,
        parent=parents_full,
        schedule=schedule,
    )


def grow_tree(schedule: MemorySchedule, n: int, seed: int) -> Tree:
    """Grow a tree and return its parent array (same stream as grow_streaming)."""
    return grow_streaming(schedule, n, seed, collect={"parents"}).tree()


def grow_many_small(
    schedule: MemorySchedule, n: int, replications: int, seed: int
) -> np.ndarray:
    """Parent matrix of many independent small trees (rows = replications).

    Column v-2 holds the parent of vertex v.  Statistically equivalent to
    ``replications`` independent grow_tree calls; used for exact small-n law
    checks where per-call stream setup would dominate.
    """
    if n < 1 or n > 64:
        raise ValueError("intended for small n only")
    gen = _rng.stream(seed)
    out = np.zeros((replications, max(n - 1, 0)), dtype=np.int64)
    for m in range(1, n):
        m_rep = np.full(replications, m, dtype=np.int64)
        if isinstance(schedule, Sarrt):
            v = np.asarray(schedule.quantile(gen.random(replications)), dtype=np.float64)
            out[:, m - 1] = np.maximum(np.floor(m * v).astype(np.int64), 1)
        else:
            lo = schedule.lo_block(m_rep)
            out[:, m - 1] = gen.integers(lo, m_rep, endpoint=True)
    return out


def enumerate_window_law(schedule: MemorySchedule, n: int) -> dict[tuple[int, ...], float]:
    """Exact distribution over parent vectors (parent of 2, ..., parent of n).

    Windowed schedules choose each parent independently and uniformly in its
    window, so every vector in the product of windows has equal mass.
    """
    if isinstance(schedule, Sarrt):
        raise ValueError("exact enumeration applies to windowed schedules only")
    if n > 10:
        raise ValueError("enumeration is exponential; keep n <= 10")
    widths = []
    los = []
    for m in range(1, n):
        lo, hi = window(schedule, m)
        los.append(lo)
        widths.append(hi - lo + 1)
    total = 1
    for w in widths:
        total *= w
    law: dict[tuple[int, ...], float] = {}

    def rec(prefix: tuple[int, ...], m_idx: int):
        if m_idx == len(widths):
            law[prefix] = 1.0 / total
            return
        for p in range(los[m_idx], los[m_idx] + widths[m_idx]):
            rec(prefix + (p,), m_idx + 1)

    rec((), 0)
    return law
