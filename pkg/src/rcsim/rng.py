"""Seeded random streams.

Every consumer gets its own stream keyed by ``(seed, node, purpose)`` so
that adding draws in one place never shifts the numbers seen elsewhere.
Streams are numpy ``PCG64`` generators seeded through ``SeedSequence``,
whose output is fixed across platforms.
"""

from __future__ import annotations

import zlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def _tag_code(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def stream(seed: int, node: int, purpose: str) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & SEED_MASK, int(node), _tag_code(purpose)])
    return np.random.Generator(np.random.PCG64(ss))


def uniform_per_node(seed: int, n: int, purpose: str, low: float, high: float) -> list[float]:
    return [float(stream(seed, i, purpose).uniform(low, high)) for i in range(n)]
