"""Deterministic RNG derivation: every stream is keyed by (seed, purpose tag, indices)."""

from __future__ import annotations

import zlib

import numpy as np


def derive_seed(seed: int, tag: str, *indices: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), zlib.crc32(tag.encode()), *map(int, indices)])


def derive_rng(seed: int, tag: str, *indices: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, tag, *indices))
