"""Deterministic seed derivation for experiment cells.

Every randomized component of a sweep (network generation, plan building,
epidemic replicates) gets its own 64-bit seed derived from the master seed
and the cell coordinates, so any cell can be recomputed in isolation and
the full sweep is reproducible regardless of scheduling.

The derivation is a stated, stable hash: the coordinates are rendered to a
canonical string (ints as ``i:<n>``, floats as ``f:<repr>``, strings as
``s:<text>``, joined with ``|``) and digested with BLAKE2b keyed by the
master seed; the 8-byte digest, little-endian, is the derived seed.
"""

from __future__ import annotations

import hashlib
from enum import Enum

import numpy as np

_MASK64 = (1 << 64) - 1


def _canonical(part) -> str:
    if isinstance(part, Enum):
        part = part.value
    if isinstance(part, bool):
        return f"i:{int(part)}"
    if isinstance(part, (int, np.integer)):
        return f"i:{int(part)}"
    if isinstance(part, (float, np.floating)):
        return f"f:{float(part)!r}"
    if isinstance(part, str):
        return f"s:{part}"
    raise TypeError(f"cannot canonicalize seed part of type {type(part)!r}")


def derive_seed(master_seed: int, *parts) -> int:
    """Derive a 64-bit seed from ``master_seed`` and coordinate ``parts``."""
    key = (int(master_seed) & _MASK64).to_bytes(8, "little")
    message = "|".join(_canonical(p) for p in parts).encode("utf-8")
    digest = hashlib.blake2b(message, digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")


def rng_for(master_seed: int, *parts) -> np.random.Generator:
    """Seeded generator for one experiment cell."""
    return np.random.default_rng(derive_seed(master_seed, *parts))
