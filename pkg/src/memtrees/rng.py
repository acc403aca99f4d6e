"""Reproducible random streams.

All randomness in this package flows through numpy's PCG64 generator.  Sweeps
and replication ensembles derive one independent stream per cell from a single
master seed with the SplitMix64 finalizer below, so results do not depend on
execution order or parallelism.  A couple of tight inner loops (the ancestor
chain simulator) use a raw SplitMix64 sequence directly inside numba kernels;
those streams are seeded with the same mixer.
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "pcg64+splitmix64"

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(master_seed: int, index: int) -> int:
    """Avalanche all bits of ``master_seed XOR golden*index`` (SplitMix64 finalizer).

    Distinct (seed, index) pairs map to well-separated 64-bit stream seeds;
    the same pair always maps to the same value on every platform.
    """
    z = (int(master_seed) ^ (int(index) * _GOLDEN)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def stream(seed: int) -> np.random.Generator:
    """PCG64 generator for one 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Generator for cell ``index`` of a sweep with the given master seed."""
    return stream(mix64(master_seed, index))
