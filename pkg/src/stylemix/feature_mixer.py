"""Smooth feature-level style mixing.

The statistics of the diversified feature map are smoothed toward their
dominant GMM mode, Beta-mixed into the statistics of the image-mixed feature
map, shuffled across channels, and finally imposed on the normalized
image-mixed map.

RNG draw order within one call is fixed: beta, then the permutation, then
the GMM seeding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gmm import smooth_stats
from .rng import sample_beta
from .stats import EPS, ChannelStats
from .tensor_io import validate_feature_map

__all__ = [
    "ChannelStats",
    "FeatureMixResult",
    "MixParams",
    "apply_stats",
    "channel_stats",
    "mix_features",
    "mix_stats",
    "shuffle_stats",
    "smooth_feature_style_mix",
]


@dataclass(frozen=True)
class MixParams:
    beta_a: float = 0.1
    beta_b: float = 2.0
    gmm_components: int = 5
    shuffle: bool = True

    def __post_init__(self):
        if not self.beta_a > 0:
            raise ValueError(f"beta_a must be positive, got {self.beta_a}")
        if not self.beta_b > 0:
            raise ValueError(f"beta_b must be positive, got {self.beta_b}")
        if int(self.gmm_components) != self.gmm_components or self.gmm_components < 1:
            raise ValueError(f"gmm_components must be an integer >= 1, got {self.gmm_components}")


@dataclass
class FeatureMixResult:
    fmap: np.ndarray
    beta: float
    permutation: np.ndarray
    replaced: np.ndarray     # channels of the diversified stats moved by smoothing
    target: ChannelStats     # statistics imposed on the output


def channel_stats(fmap) -> ChannelStats:
    """Per-channel mean and ``sqrt(population variance + EPS**2)``."""
    fmap = validate_feature_map(fmap)
    flat = fmap.reshape(fmap.shape[0], -1)
    mu = flat.mean(axis=1)
    var = np.mean((flat - mu[:, None]) ** 2, axis=1)
    return ChannelStats(mu, np.sqrt(var + EPS**2))


def mix_stats(stats_m: ChannelStats, stats_star: ChannelStats, beta: float) -> ChannelStats:
    if stats_m.channels != stats_star.channels:
        raise ValueError(f"channel counts differ: {stats_m.channels} vs {stats_star.channels}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    mu = (1.0 - beta) * stats_m.mu + beta * stats_star.mu
    sigma = (1.0 - beta) * stats_m.sigma + beta * stats_star.sigma
    # rounding may leave the convex hull by an ulp; sigma must stay >= EPS
    mu = np.clip(mu, np.minimum(stats_m.mu, stats_star.mu), np.maximum(stats_m.mu, stats_star.mu))
    sigma = np.clip(sigma, np.minimum(stats_m.sigma, stats_star.sigma),
                    np.maximum(stats_m.sigma, stats_star.sigma))
    return ChannelStats(mu, sigma)


def shuffle_stats(stats: ChannelStats, perm) -> ChannelStats:
    """Reorder channels: output channel ``c`` takes input channel ``perm[c]``."""
    perm = np.asarray(perm)
    if (perm.shape != (stats.channels,) or not np.issubdtype(perm.dtype, np.integer)
            or not np.array_equal(np.sort(perm), np.arange(stats.channels))):
        raise ValueError(f"not a permutation of {stats.channels} channels: {perm.tolist()}")
    return ChannelStats(stats.mu[perm], stats.sigma[perm])


def apply_stats(fmap, target: ChannelStats) -> np.ndarray:
    """Normalize each channel by its own statistics, then impose ``target``."""
    fmap = validate_feature_map(fmap)
    if target.channels != fmap.shape[0]:
        raise ValueError(f"target has {target.channels} channels, feature map has {fmap.shape[0]}")
    own = channel_stats(fmap)
    scale = (target.sigma / own.sigma)[:, None, None]
    return (fmap - own.mu[:, None, None]) * scale + target.mu[:, None, None]


def mix_features(f_m, f_st, params: MixParams, rng: np.random.Generator,
                 beta: float | None = None) -> FeatureMixResult:
    """Run the full mixing chain and keep every intermediate a report needs.

    ``beta`` overrides the Beta draw (nothing is drawn for it then). The
    permutation is drawn only when ``params.shuffle`` is set.
    """
    f_m = validate_feature_map(f_m, "mixed feature map")
    f_st = validate_feature_map(f_st, "diversified feature map")
    if f_m.shape[0] != f_st.shape[0]:
        raise ValueError(f"channel counts differ: {f_m.shape[0]} vs {f_st.shape[0]}")
    c = f_m.shape[0]

    if beta is None:
        beta = sample_beta(rng, params.beta_a, params.beta_b)
    elif not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    perm = rng.permutation(c) if params.shuffle else np.arange(c)

    stats_m = channel_stats(f_m)
    stats_st = channel_stats(f_st)
    stats_star, replaced = smooth_stats(stats_st, params.gmm_components, rng, return_replaced=True)
    target = shuffle_stats(mix_stats(stats_m, stats_star, beta), perm)
    out = apply_stats(f_m, target)
    return FeatureMixResult(out, float(beta), perm, np.flatnonzero(replaced), target)


def smooth_feature_style_mix(f_m, f_st, params: MixParams, rng: np.random.Generator,
                             beta: float | None = None) -> np.ndarray:
    """Dual style mixed feature map with the shape of ``f_m``."""
    return mix_features(f_m, f_st, params, rng, beta=beta).fmap
