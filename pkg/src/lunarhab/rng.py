"""Seeded random streams.

Every stream is a Philox4x64 counter-based generator keyed through a
``SeedSequence`` built from integer words, so a (seed, path) pair names
one reproducible stream independent of execution order.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *path: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *path])))


def derive_seed(seed: int, *path: int) -> int:
    """A 63-bit child seed, stable across platforms."""
    word = np.random.SeedSequence([seed, *path]).generate_state(1, np.uint64)[0]
    return int(word >> np.uint64(1))
