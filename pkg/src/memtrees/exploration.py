"""Joint exploration of the ancestral lines of the youngest vertices.

The exploration keeps one frontier label per start vertex (the deepest
ancestor revealed so far on that line) and repeats two steps:

(1) if two frontier labels coincide the lines have met: record T and stop;
(2) otherwise reveal the parent of the largest frontier label and advance
    that line's counter.

Because step (2) always advances the current maximum, the first coincidence
is exactly the largest label that is a common ancestor of two starts -- the
terminal vertex equals the most recent common ancestor found by intersecting
chains.  A memory-light Markov simulator of a single ancestor chain and a
replication driver for coalescence heights live here too.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from ._kernels import simulate_chain_kernel
from .generate import Tree, grow_tree
from .schedules import Mesoscopic


@dataclass(frozen=True)
class ExplorationStep:
    m: int
    revealed_label: int
    chosen_line: int
    counts: tuple[int, ...]


@dataclass(frozen=True)
class ExplorationTrace:
    """Full record of one joint ancestral exploration."""

    k: int
    starts: tuple[int, ...]
    steps: tuple[ExplorationStep, ...]
    termination_step: int
    terminal_label: int
    coalesced_pair: tuple[int, int]

    @property
    def revealed_labels(self) -> list[int]:
        return [s.revealed_label for s in self.steps]


def explore_ancestral_lines(
    tree: Tree, k: int, starts: list[int] | None = None, record_steps: bool = True
) -> ExplorationTrace:
    """Run the exploration on a grown tree until two lines meet.

    ``starts`` defaults to the k youngest vertices n, n-1, ..., n-k+1.  For
    the limit theory the starts should satisfy starts_min >= window_lo(n-1);
    that is checked and warned about, not rejected.  The trace is
    deterministic given the tree.
    """
    if k < 2:
        raise ValueError("need k >= 2 lines")
    if tree.n < k:
        raise ValueError(f"tree has {tree.n} vertices < k = {k}")
    if starts is None:
        starts = list(range(tree.n, tree.n - k, -1))
    if len(starts) != k or len(set(starts)) != k:
        raise ValueError("starts must be k distinct labels")
    for v in starts:
        if not 1 <= v <= tree.n:
            raise ValueError(f"start {v} outside 1..{tree.n}")
    if tree.schedule is not None and tree.n > 1:
        from .schedules import WindowlessScheduleError

        try:
            lo = tree.schedule.window_lo(tree.n - 1)
        except WindowlessScheduleError:
            lo = None
        if lo is not None and min(starts) < lo:
            warnings.warn(
                f"starts reach below window_lo(n-1) = {lo}; "
                "the coalescence theory assumes younger starts",
                stacklevel=2,
            )

    frontier = list(starts)
    counts = [0] * k
    steps: list[ExplorationStep] = []
    m = 0
    while True:
        # step (1): check for a meeting among current frontier labels
        seen: dict[int, int] = {}
        pair = None
        for i, lab in enumerate(frontier):
            if lab in seen:
                pair = (seen[lab], i)
                break
            seen[lab] = i
        if pair is not None:
            return ExplorationTrace(
                k=k,
                starts=tuple(starts),
                steps=tuple(steps),
                termination_step=m,
                terminal_label=frontier[pair[0]],
                coalesced_pair=pair,
            )
        # step (2): advance the line with the largest frontier label
        line = max(range(k), key=lambda i: frontier[i])
        if frontier[line] == 1:
            raise RuntimeError("all lines reached the root without meeting")  # impossible
        nxt = int(tree.parent[frontier[line]])
        frontier[line] = nxt
        counts[line] += 1
        m += 1
        if record_steps:
            steps.append(ExplorationStep(m, nxt, line, tuple(counts)))


def simulate_chain(
    n: int,
    beta: float,
    seed: int,
    stop_at: int | str = "absorption",
    idealized_window: bool = False,
) -> np.ndarray:
    """Ancestor-label chain of vertex n, without growing a tree.

    One jump per revealed ancestor, O(1) memory per step.  By default the
    jump law matches the tree's parent law (uniform on the inclusive window
    of the current label); ``idealized_window=True`` switches to the idealized
    window {l-1, ..., l - floor(l**beta)} of width floor(l**beta), whose
    chain can step to 0.  ``stop_at`` is "absorption" or a label threshold.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0,1), got {beta}")
    if stop_at == "absorption":
        stop_label = 0 if idealized_window else 1
    else:
        stop_label = int(stop_at)
    # path length is ~ (2/(1-beta)) n^(1-beta); 64n^(1-beta)+64 is a safe roof
    cap = int(64.0 * float(n) ** (1.0 - beta)) + 64
    kernel_seed = np.uint64(_rng.mix64(seed, 0))
    out = np.zeros(cap, dtype=np.int64)
    count = simulate_chain_kernel(n, beta, kernel_seed, stop_label, idealized_window, out)
    while count >= cap and out[count - 1] > stop_label:  # pragma: no cover
        cap *= 4
        out = np.zeros(cap, dtype=np.int64)
        count = simulate_chain_kernel(n, beta, kernel_seed, stop_label, idealized_window, out)
    return out[:count]


@dataclass(frozen=True)
class BranchpointSample:
    """Coalescence depths of one replication batch."""

    beta: float
    n: int
    k: int
    seeds: tuple[int, ...]
    depths: np.ndarray
    scaled_depths: np.ndarray  # depth / (4 sqrt(n))
    leaf_depths: np.ndarray  # (reps, k) root distances of the start vertices
    terminal_labels: np.ndarray


def branchpoint_statistics(
    beta: float, n: int, k: int, replications: int, master_seed: int
) -> BranchpointSample:
    """Grow trees, run the exploration, return scaled coalescence depths.

    Depths are root distances of the terminal (deepest common) branchpoint;
    the scaling 1/(4 sqrt(n)) matches the critical-window limit law, so at
    beta = 1/2 / k = 2 the scaled values follow the cdf x**8 in the limit.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    schedule = Mesoscopic(beta)
    depths = np.zeros(replications)
    labels = np.zeros(replications, dtype=np.int64)
    leaf_d = np.zeros((replications, k), dtype=np.int64)
    seeds = tuple(_rng.mix64(master_seed, i) for i in range(replications))
    scale = 1.0 / (4.0 * np.sqrt(n))
    for i, seed in enumerate(seeds):
        tree = grow_tree(schedule, n, seed)
        trace = explore_ancestral_lines(tree, k, record_steps=False)
        lab = trace.terminal_label
        labels[i] = lab
        d = 0
        v = lab
        while v != 1:
            v = int(tree.parent[v])
            d += 1
        depths[i] = d
        for jj in range(k):
            v = tree.n - jj
            dd = 0
            while v != 1:
                v = int(tree.parent[v])
                dd += 1
            leaf_d[i, jj] = dd
    return BranchpointSample(
        beta=beta,
        n=n,
        k=k,
        seeds=seeds,
        depths=depths,
        scaled_depths=depths * scale,
        leaf_depths=leaf_d,
        terminal_labels=labels,
    )
