"""Counter-keyed random streams.

Every random draw in the package comes from a generator addressed by a
master seed plus a tuple of non-negative integers (replicate index, sample
size, run index, ...). Results therefore do not depend on scheduling or on
how many workers run the tasks.
"""

from __future__ import annotations

import zlib

import numpy as np

DEFAULT_SEED = 20240229


def stream(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for ``(seed, *key)``."""
    if seed < 0 or any(k < 0 for k in key):
        raise ValueError("seed and stream keys must be non-negative integers")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def label_key(label: str) -> int:
    """Stable integer key for a text label (CRC-32)."""
    return zlib.crc32(label.encode("utf-8"))
