"""Read-only analyses of grown trees.

All operations are pure functions of the immutable parent array: depths and
heights, ancestor chains, degree counts, fringe subtrees in canonical (AHU)
form, subtrees spanned by leaf sets, and distances to the root-to-n spine.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ._kernels import accumulate_chunk, distances_to_marked, subtree_sizes
from .generate import Tree

#: Histogram key carrying the mass of fringes larger than the size cap.
TRUNCATED = "truncated"


class Truncated:
    """Marker: the requested subtree exceeds the size cap."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Truncated"


TRUNCATED_MARKER = Truncated()


@dataclass(frozen=True)
class FringeTree:
    """Rooted tree up to isomorphism, as its AHU canonical code.

    The code of a leaf is "()"; an internal vertex wraps the lexicographically
    sorted concatenation of its children's codes.  size equals the number of
    '(' characters.
    """

    canonical_code: str
    size: int

    @classmethod
    def from_code(cls, code: str) -> "FringeTree":
        return cls(code, code.count("("))


FRINGE_LEAF = FringeTree("()", 1)


def _check_label(tree: Tree, v: int) -> None:
    if not 1 <= v <= tree.n:
        raise ValueError(f"label {v} outside 1..{tree.n}")


def depths(tree: Tree) -> np.ndarray:
    """Depth of every vertex (index 1..n; root depth 0), one ascending pass."""
    depth = np.zeros(tree.n + 1, dtype=np.int32)
    scratch = np.zeros(tree.n + 1, dtype=np.int32)
    if tree.n > 1:
        accumulate_chunk(tree.parent[2:], 2, depth, scratch, 0)
    return depth


def depth_of(tree: Tree, v: int) -> int:
    """Edge distance from v to the root, following parent pointers."""
    _check_label(tree, v)
    d = 0
    while v != 1:
        v = int(tree.parent[v])
        d += 1
    return d


def height(tree: Tree) -> int:
    """Largest depth over all vertices."""
    return int(depths(tree)[1:].max())


def ancestor_chain(tree: Tree, v: int) -> np.ndarray:
    """Labels (v, parent(v), ..., 1); strictly decreasing."""
    _check_label(tree, v)
    out = [v]
    while v != 1:
        v = int(tree.parent[v])
        out.append(v)
    return np.asarray(out, dtype=np.int64)


def degree_histogram(tree: Tree) -> dict[int, int]:
    """Counts of graph degree: child count plus one for every non-root vertex."""
    child_count = np.bincount(tree.parent[2:], minlength=tree.n + 1)[1:]
    degree = child_count.astype(np.int64)
    degree[1:] += 1
    counts = np.bincount(degree)
    return {int(k): int(c) for k, c in enumerate(counts) if c}


def children_csr(tree: Tree) -> tuple[np.ndarray, np.ndarray]:
    """(indptr, order): children of v are order[indptr[v]:indptr[v+1]], CSR style."""
    n = tree.n
    counts = np.bincount(tree.parent[2:], minlength=n + 2)
    indptr = np.zeros(n + 2, dtype=np.int64)
    np.cumsum(counts[: n + 1], out=indptr[1 : n + 2])
    order = np.argsort(tree.parent[2:], kind="stable").astype(np.int64) + 2
    return indptr, order


def code_from_children(root: int, kids_of, size_cap: int) -> str | None:
    """AHU code of the subtree at ``root``, or None if it exceeds size_cap."""
    seen = 1
    if seen > size_cap:
        return None
    # frames: [vertex, iterator over children, collected child codes]
    frames = [[root, iter(kids_of(root)), []]]
    while True:
        v, it, parts = frames[-1]
        nxt = next(it, None)
        if nxt is None:
            parts.sort()
            code = "(" + "".join(parts) + ")"
            frames.pop()
            if not frames:
                return code
            frames[-1][2].append(code)
        else:
            seen += 1
            if seen > size_cap:
                return None
            frames.append([nxt, iter(kids_of(nxt)), []])


def fringe_at(tree: Tree, v: int, size_cap: int, _csr=None) -> FringeTree | Truncated:
    """Canonical form of the subtree of descendants of v, or Truncated."""
    _check_label(tree, v)
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    indptr, order = _csr if _csr is not None else children_csr(tree)

    def kids_of(u):
        return order[indptr[u] : indptr[u + 1]]

    code = code_from_children(v, kids_of, size_cap)
    if code is None:
        return TRUNCATED_MARKER
    return FringeTree.from_code(code)


def fringe_counts(tree: Tree, size_cap: int) -> Counter:
    """Counts of canonical fringe codes over all n vertices.

    Fringes larger than size_cap are pooled under the TRUNCATED key.  Codes
    are built bottom-up in one descending label sweep (children always carry
    larger labels than their parent).
    """
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    n = tree.n
    sizes = np.zeros(n + 1, dtype=np.int64)
    subtree_sizes(tree.parent, sizes)
    indptr, order = children_csr(tree)
    codes: list[str | None] = [None] * (n + 1)
    counts: Counter = Counter()
    for v in range(n, 0, -1):
        if sizes[v] > size_cap:
            counts[TRUNCATED] += 1
            continue
        kids = order[indptr[v] : indptr[v + 1]]
        if kids.shape[0] == 0:
            code = "()"
        else:
            parts = sorted(codes[c] for c in kids)
            code = "(" + "".join(parts) + ")"
        codes[v] = code
        counts[code] += 1
    return counts


def empirical_fringe(tree: Tree, size_cap: int) -> dict[str, float]:
    """Empirical fringe distribution over all vertices; frequencies sum to 1."""
    counts = fringe_counts(tree, size_cap)
    n = tree.n
    return {code: c / n for code, c in counts.items()}


def extended_fringe(
    tree: Tree, v: int, k: int, size_cap: int, _csr=None
) -> list[FringeTree | Truncated]:
    """Fringes along the path from v toward the root, truncated at distance k.

    Entry 0 is the fringe at v; entry i is the subtree rooted at the i-th
    ancestor with the branch leading back toward the (i-1)-st ancestor
    removed, again in canonical form.  Bulk callers pass a shared
    children_csr(tree) as ``_csr`` to avoid rebuilding it per vertex.
    """
    _check_label(tree, v)
    if k < 0:
        raise ValueError("k must be >= 0")
    csr = _csr if _csr is not None else children_csr(tree)
    indptr, order = csr

    anc = [v]
    u = v
    for _ in range(k):
        if u == 1:
            raise ValueError(f"too shallow: depth_of({v}) < {k}")
        u = int(tree.parent[u])
        anc.append(u)

    out: list[FringeTree | Truncated] = [fringe_at(tree, v, size_cap, _csr=csr)]
    for i in range(1, k + 1):
        root, banned = anc[i], anc[i - 1]

        def kids_of(u, _root=root, _banned=banned):
            kids = order[indptr[u] : indptr[u + 1]]
            if u == _root:
                return kids[kids != _banned]
            return kids

        code = code_from_children(root, kids_of, size_cap)
        out.append(TRUNCATED_MARKER if code is None else FringeTree.from_code(code))
    return out


@dataclass(frozen=True)
class SpannedSubtree:
    """Steiner subtree of a leaf set: branchpoints, depths and leaf distances."""

    leaves: tuple[int, ...]
    branchpoints: tuple[tuple[int, int], ...]  # (label, depth), deepest first
    leaf_depths: tuple[int, ...]
    pairwise_distances: np.ndarray

    def top_branchpoint(self) -> tuple[int, int] | None:
        return self.branchpoints[0] if self.branchpoints else None


def spanned_subtree(tree: Tree, leaves: list[int]) -> SpannedSubtree:
    """Subtree of the tree spanned by ``leaves`` via ancestor-chain intersection.

    The most recent common ancestor of two leaves is the largest label their
    chains share (chains are strictly decreasing, so the shared suffix starts
    there); d(u, w) adds the chain offsets of the meeting point.
    """
    if len(set(leaves)) != len(leaves):
        raise ValueError("leaves must be distinct")
    for v in leaves:
        _check_label(tree, v)
    chains = [ancestor_chain(tree, v) for v in leaves]
    positions = [{int(lab): i for i, lab in enumerate(ch)} for ch in chains]
    k = len(leaves)
    dist = np.zeros((k, k), dtype=np.int64)
    mrcas: set[int] = set()
    for a in range(k):
        for b in range(a + 1, k):
            pa, pb = positions[a], positions[b]
            if len(pa) > len(pb):
                pa, pb = pb, pa
            mrca = max(lab for lab in pa if lab in pb)
            mrcas.add(mrca)
            d = positions[a][mrca] + positions[b][mrca]
            dist[a, b] = dist[b, a] = d
    depth_cache: dict[int, int] = {}

    def dep(lab: int) -> int:
        if lab not in depth_cache:
            depth_cache[lab] = depth_of(tree, lab)
        return depth_cache[lab]

    bps = sorted(((lab, dep(lab)) for lab in mrcas), key=lambda t: (-t[1], -t[0]))
    leaf_depths = tuple(len(ch) - 1 for ch in chains)
    return SpannedSubtree(
        leaves=tuple(int(v) for v in leaves),
        branchpoints=tuple(bps),
        leaf_depths=leaf_depths,
        pairwise_distances=dist,
    )


def spine_distances(tree: Tree) -> np.ndarray:
    """Distance from every vertex to the root-to-n path (index 1..n)."""
    if tree.n < 1:
        raise ValueError("need n >= 1")
    marked = np.zeros(tree.n + 1, dtype=np.bool_)
    marked[ancestor_chain(tree, tree.n)] = True
    out = np.zeros(tree.n + 1, dtype=np.int32)
    distances_to_marked(tree.parent, marked, out)
    return out


def max_dist_to_spine(tree: Tree) -> int:
    """Largest distance from any vertex to the root-to-n path."""
    if tree.n < 2:
        raise ValueError("need n >= 2")
    return int(spine_distances(tree)[1:].max())
