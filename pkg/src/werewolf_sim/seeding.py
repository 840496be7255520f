"""Stable hashing and seed derivation.

Python's builtin ``hash`` is salted per process, so everything that must be
reproducible across runs goes through SHA-256 instead.
"""

from __future__ import annotations

import hashlib
import random

MASK64 = (1 << 64) - 1


def stable_hash(*parts: object) -> int:
    """64-bit unsigned hash of ``parts``, identical across processes and platforms."""
    joined = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(joined).digest()[:8], "big")


def derive_seed(seed: int, *labels: object) -> int:
    return stable_hash(seed & MASK64, *labels)


def rng_for(seed: int, *labels: object) -> random.Random:
    """Independent stream for one labelled purpose; insensitive to call order elsewhere."""
    return random.Random(derive_seed(seed, *labels))
