"""File formats: parent CSV, DOT, fringe/constants/pmf CSV, trace CSV, JSON.

All CSV is UTF-8 with LF line endings; floats use the shared 17-significant-
digit rule so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .analysis import SpannedSubtree
from .exploration import ExplorationTrace
from .generate import Tree
from .harness import fmt_float
from .limits import HeightConstants


def _write(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def parent_csv(tree: Tree) -> str:
    """Header ``vertex,parent``, one row per vertex 2..n."""
    lines = ["vertex,parent"]
    par = tree.parent
    lines.extend(f"{v},{int(par[v])}" for v in range(2, tree.n + 1))
    return "\n".join(lines) + "\n"


def write_parent_csv(tree: Tree, path: str | Path) -> None:
    _write(path, parent_csv(tree))


def read_parent_csv(path: str | Path) -> Tree:
    """Rebuild a tree from a parent CSV (schedule/seed provenance is not stored)."""
    lines = Path(path).read_text(encoding="utf-8").strip().split("\n")
    lines = [ln for ln in lines if not ln.startswith("#")]
    if not lines or lines[0] != "vertex,parent":
        raise ValueError(f"{path}: expected header 'vertex,parent'")
    rows = [line.split(",") for line in lines[1:] if line]
    n = 1 + len(rows)
    parent = np.zeros(n + 1, dtype=np.int64)
    for vs, ps in rows:
        v, p = int(vs), int(ps)
        if not (2 <= v <= n and 1 <= p < v):
            raise ValueError(f"{path}: invalid edge {v} -> {p}")
        parent[v] = p
    if np.any(parent[2:] == 0):
        raise ValueError(f"{path}: missing rows for some vertices")
    return Tree(n=n, parent=parent, schedule=None, seed=None)


def tree_dot(tree: Tree) -> str:
    """DOT digraph with one edge child -> parent per non-root vertex."""
    lines = ["digraph T {"]
    par = tree.parent
    lines.extend(f"  {v} -> {int(par[v])};" for v in range(2, tree.n + 1))
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_tree_dot(tree: Tree, path: str | Path) -> None:
    _write(path, tree_dot(tree))


def fringe_csv(counts: Mapping[str, int], total: int) -> str:
    """Header ``code,count,frequency`` sorted by decreasing count."""
    lines = ["code,count,frequency"]
    for code, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append(f'"{code}",{c},{fmt_float(c / total)}')
    return "\n".join(lines) + "\n"


def constants_csv(rows: Iterable[HeightConstants]) -> str:
    """Header ``theta,kappa,alpha_max,mu_drift,c_theta``."""
    lines = ["theta,kappa,alpha_max,mu_drift,c_theta"]
    for r in rows:
        lines.append(
            ",".join(
                fmt_float(x) for x in (r.theta, r.kappa, r.alpha_max, r.mu_drift, r.c_theta)
            )
        )
    return "\n".join(lines) + "\n"


def pmf_csv(pmf: Mapping[int, float]) -> str:
    """Header ``k,probability``."""
    lines = ["k,probability"]
    for k in sorted(pmf):
        lines.append(f"{k},{fmt_float(pmf[k])}")
    return "\n".join(lines) + "\n"


def trace_csv(trace: ExplorationTrace) -> str:
    """Header ``m,revealed_label,chosen_line,M_1,...,M_k``."""
    head = "m,revealed_label,chosen_line," + ",".join(f"M_{i+1}" for i in range(trace.k))
    lines = [head]
    for s in trace.steps:
        lines.append(
            f"{s.m},{s.revealed_label},{s.chosen_line + 1},"
            + ",".join(str(c) for c in s.counts)
        )
    return "\n".join(lines) + "\n"


def branchpoint_csv(seeds, depths, scaled) -> str:
    """Header ``replication,seed,depth,scaled_depth``."""
    lines = ["replication,seed,depth,scaled_depth"]
    for i, (s, d, sc) in enumerate(zip(seeds, depths, scaled)):
        lines.append(f"{i},{s},{int(d)},{fmt_float(sc)}")
    return "\n".join(lines) + "\n"


def spanned_subtree_json(sub: SpannedSubtree) -> str:
    body = {
        "leaves": list(sub.leaves),
        "branchpoints": [{"label": int(l), "depth": int(d)} for l, d in sub.branchpoints],
        "leaf_depths": list(sub.leaf_depths),
        "distance_matrix": [int(x) for x in sub.pairwise_distances.ravel()],
    }
    return json.dumps(body, sort_keys=True, indent=1)


def spanned_subtree_dot(sub: SpannedSubtree) -> str:
    """DOT sketch of the spanned subtree: leaves, branchpoints, root."""
    lines = ["digraph S {"]
    for lab, d in sub.branchpoints:
        lines.append(f'  {lab} [shape=box,label="bp {lab} (depth {d})"];')
    nodes = {1} | {lab for lab, _ in sub.branchpoints}
    order = sorted(nodes)
    for leaf, d in zip(sub.leaves, sub.leaf_depths):
        lines.append(f'  {leaf} [label="leaf {leaf} (depth {d})"];')
    # chain skeleton: connect sorted branchpoints/root, then leaves to the deepest bp
    for a, b in zip(order, order[1:]):
        lines.append(f"  {b} -> {a};")
    top = order[-1]
    for leaf in sub.leaves:
        if leaf != top:
            lines.append(f"  {leaf} -> {top};")
    lines.append("}")
    return "\n".join(lines) + "\n"
