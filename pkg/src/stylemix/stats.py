"""Per-channel feature statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = 1e-5


@dataclass(frozen=True)
class ChannelStats:
    """Channel means and standard deviations, each of length C."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if mu.ndim != 1 or mu.shape != sigma.shape:
            raise ValueError(f"mu and sigma must be equal-length vectors, got {mu.shape} and {sigma.shape}")
        if len(mu) == 0:
            raise ValueError("statistics need at least one channel")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise ValueError("statistics must be finite")
        if np.any(sigma < EPS):
            raise ValueError(f"sigma must be >= {EPS}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def channels(self) -> int:
        return len(self.mu)

    def points(self) -> np.ndarray:
        """Stack as an (C, 2) array of ``(mu_c, sigma_c)`` rows."""
        return np.stack((self.mu, self.sigma), axis=1)

    @classmethod
    def from_points(cls, points) -> "ChannelStats":
        points = np.asarray(points, dtype=np.float64)
        return cls(points[:, 0].copy(), points[:, 1].copy())
