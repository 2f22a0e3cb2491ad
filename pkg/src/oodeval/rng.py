"""Seeded shuffling shared by all sampling code.

Every random draw in the toolkit flows through this module so that a run is
reproducible from a single root seed.  The shuffle is an explicit
Fisher-Yates over the Mersenne Twister; the algorithm identifier below is
recorded in run manifests.
"""

from __future__ import annotations

import hashlib
import random
from typing import Sequence, TypeVar

ALGORITHM_ID = "mt19937/fisher-yates"

T = TypeVar("T")


def shuffled(items: Sequence[T], seed: int) -> list[T]:
    """Return a Fisher-Yates shuffled copy of `items`, deterministic per seed."""
    out = list(items)
    rng = random.Random(seed)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randrange(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def derive_seed(root: int, *scope: object) -> int:
    """Derive an independent child seed for a named scope.

    Hash-based so streams for different (subset, method, class) scopes are
    independent and stable across platforms.
    """
    tag = ":".join([str(root), *map(str, scope)]).encode("utf-8")
    return int.from_bytes(hashlib.sha256(tag).digest()[:8], "big")
