"""Deterministic seed derivation.

Every stochastic component draws from a seed derived by hashing the master
seed together with string/int tags, so results are reproducible across runs
and independent of scheduling order.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, *parts: object) -> int:
    """64-bit seed from a master seed and any hashable tag sequence."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master) & _MASK64).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "little")


def rng_for(master: int, *parts: object) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *parts))
