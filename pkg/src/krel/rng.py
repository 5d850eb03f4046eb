"""Deterministic random generation.

All randomness in the package flows through :func:`generator`, which builds a
counter-based Philox generator from an explicit seed plus an optional stream
path.  Counter-based generators give identical output across platforms, so a
recorded seed reproduces every draw of a run exactly.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_MIX = 0x9E3779B97F4A7C15


def generator(seed: int, *stream: int) -> np.random.Generator:
    """Return a Philox generator keyed by ``seed`` and a stream path.

    Distinct paths (for example per dimension combo and case index) give
    statistically independent streams under the same seed.
    """
    sub = 0
    for part in stream:
        sub = (sub * _MIX + int(part) + 1) & _MASK64
    key = np.array([int(seed) & _MASK64, sub], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def complex_normal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard complex normal matrix (unit total variance per entry)."""
    real = rng.standard_normal((rows, cols))
    imag = rng.standard_normal((rows, cols))
    return (real + 1j * imag) / np.sqrt(2.0)
