"""Per-entry random streams and the two mixing-weight samplers."""

from __future__ import annotations

import math

import numpy as np

_U64 = (1 << 64) - 1


def derive_stream(seed: int, entry_index: int) -> np.random.Generator:
    """Counter-based stream for one manifest entry.

    Philox keyed by ``seed``; the entry index occupies the top word of the
    256-bit counter, so every entry owns a disjoint block of 2**192 counter
    values. The result depends only on ``(seed, entry_index)``.
    """
    if not 0 <= seed <= _U64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if not 0 <= entry_index <= _U64:
        raise ValueError(f"entry index out of range: {entry_index}")
    counter = np.array([0, 0, 0, entry_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


def sample_omega(rng: np.random.Generator, gamma1: float, gamma2: float) -> float:
    """Uniform draw on ``[gamma1, gamma2)``; returns ``gamma1`` when the range is empty."""
    if not 0.0 <= gamma1 <= gamma2 <= 1.0:
        raise ValueError(f"need 0 <= gamma1 <= gamma2 <= 1, got ({gamma1}, {gamma2})")
    if gamma1 == gamma2:
        return float(gamma1)
    omega = gamma1 + (gamma2 - gamma1) * rng.random()
    if omega >= gamma2:
        omega = math.nextafter(gamma2, gamma1)
    return float(omega)


def sample_beta(rng: np.random.Generator, a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise ValueError(f"Beta shape parameters must be positive, got ({a}, {b})")
    return float(rng.beta(a, b))
