"""Fringe distributions: what a random vertex's subtree looks like.

Subtrees are compared up to isomorphism via canonical parenthesis codes.
Tail-window trees have critical Poisson Galton-Watson fringes (exactly
computable shape by shape); fraction-window trees have the fringe law of a
finite-horizon branching process, reproduced here both by simulating that
process and through the scaled-attachment construction with V ~ U[theta,1].
"""

from collections import Counter

from memtrees import empirical_fringe, extended_fringe, fringe_at, grow_tree
from memtrees.analysis import TRUNCATED, FringeTree, children_csr
from memtrees.limits import (
    poisson_gw_shape_pmf,
    sample_macro_fringe,
    sample_poisson_gw,
    sample_sarrt_fringe,
    uniform_density,
)
from memtrees.rng import mix64
from memtrees.schedules import Macroscopic, Mesoscopic


def key(f):
    return f.canonical_code if isinstance(f, FringeTree) else TRUNCATED


print("tail-window fringes vs exact critical Galton-Watson shapes (n=3e5):")
t = grow_tree(Mesoscopic(0.5), 300_000, seed=31)
freq = empirical_fringe(t, 4)
exact = poisson_gw_shape_pmf(4)
print("  shape        observed   exact")
for code in sorted(exact, key=lambda c: (c.count("("), c)):
    print(f"  {code:<12} {freq.get(code, 0.0):.4f}    {exact[code]:.4f}")

print("\nthe same shapes from the Galton-Watson sampler directly (5e4 draws):")
counts = Counter(key(sample_poisson_gw(mix64(32, i), 4)) for i in range(50_000))
for code in ("()", "(())", "((()))"):
    print(f"  {code:<12} {counts[code] / 50_000:.4f}")

print("\nfraction-window fringes vs the branching-process reference (theta=0.5):")
tm = grow_tree(Macroscopic(0.5), 300_000, seed=33)
freq3 = empirical_fringe(tm, 3)
ref = Counter(key(sample_macro_fringe(0.5, mix64(34, i), 3)) for i in range(50_000))
dens, env = uniform_density(0.5, 1.0)
sar = Counter(key(sample_sarrt_fringe(dens, mix64(35, i), 3, envelope=env)) for i in range(50_000))
print("  shape        tree      process   scaled-attachment")
for code in sorted(freq3, key=lambda c: (c.count("("), c)):
    print(f"  {code:<12} {freq3[code]:.4f}    {ref[code] / 50_000:.4f}    {sar[code] / 50_000:.4f}")

print("\nfringes along the path to the root (extended fringe, k=2):")
csr = children_csr(t)
v = 299_999
ext = extended_fringe(t, v, 2, 6, _csr=csr)
print(f"  at vertex {v}: " + "  ".join(key(f) for f in ext))
print(f"  entry 0 is the plain fringe: {key(fringe_at(t, v, 6))}")
