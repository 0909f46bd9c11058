"""Seeded random streams.

Every random draw in the package comes from a PCG64 generator whose state is
derived from the run seed with numpy's ``SeedSequence`` and a per-purpose spawn
key. Both algorithms are published and platform independent, so a seed gives
the same streams everywhere. Separate streams mean that changing how many draws
one consumer makes never shifts the draws of another.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

import numpy as np

T = TypeVar("T")

STREAMS = {"ingest": 0, "bootstrap": 1, "selection": 2}


def stream(seed: int, purpose: str) -> np.random.Generator:
    """Independent generator for one consumer (``ingest``, ``bootstrap`` or ``selection``)."""
    key = STREAMS[purpose]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))


def sample(rng: np.random.Generator, items: Sequence[T], count: int) -> list[T]:
    """Uniform sample without replacement; ``items`` should already be in a fixed order."""
    if count <= 0:
        return []
    if count >= len(items):
        idx = rng.permutation(len(items))
    else:
        idx = rng.choice(len(items), size=count, replace=False)
    return [items[i] for i in idx]


def pick(rng: np.random.Generator, items: Sequence[T]) -> T:
    return items[int(rng.integers(len(items)))]
