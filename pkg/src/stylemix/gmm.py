"""Gaussian mixture over per-channel style statistics.

Each channel of a feature map contributes one 2-D point ``(mu_c, sigma_c)``.
A full-covariance mixture is fitted with EM; the highest-weight component
defines the dominant style mode, and channels that fall outside it are pulled
onto that mode's mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .stats import EPS, ChannelStats

TOL = 1e-6
MAX_ITER = 100
REG_SCALE = 1e-6
# keeps lambda positive when every point coincides
REG_MIN = 1e-12


class StylePoint(NamedTuple):
    mu: float
    sigma: float


@dataclass
class GmmModel:
    weights: np.ndarray        # (k,)
    means: np.ndarray          # (k, 2)
    covariances: np.ndarray    # (k, 2, 2)
    log_likelihood: float
    n_iter: int
    reg: float
    trace: list[float] = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return len(self.weights)


def _as_points(points) -> np.ndarray:
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ValueError(f"points must have shape (n, 2), got {x.shape}")
    if len(x) == 0:
        raise ValueError("cannot fit a mixture to an empty point set")
    if not np.all(np.isfinite(x)):
        raise ValueError("points must be finite")
    return x


def regularization(x: np.ndarray) -> float:
    """Eigenvalue floor for component covariances, tied to the data's spread."""
    msd = float(np.mean((x - x.mean(axis=0)) ** 2))
    return max(REG_SCALE * msd, REG_MIN)


def _canonical_order(x: np.ndarray) -> np.ndarray:
    # ascending (mu, sigma); identical rows are interchangeable
    return np.lexsort((x[:, 1], x[:, 0]))


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = [x[rng.integers(len(x))]]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            break
        cdf = np.cumsum(d2)
        idx = int(np.searchsorted(cdf, rng.random() * total, side="right"))
        idx = min(idx, len(x) - 1)
        centers.append(x[idx])
        d2 = np.minimum(d2, np.sum((x - x[idx]) ** 2, axis=1))
    return np.array(centers)


def _log_gauss(x: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """Log density of every point under every component, shape (n, k)."""
    a = covs[:, 0, 0]
    b = covs[:, 0, 1]
    d = covs[:, 1, 1]
    det = a * d - b * b
    dx = x[:, None, 0] - means[None, :, 0]
    dy = x[:, None, 1] - means[None, :, 1]
    maha = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det
    return -0.5 * maha - 0.5 * np.log(det) - np.log(2.0 * np.pi)


def _e_step(x, weights, means, covs):
    log_p = _log_gauss(x, means, covs) + np.log(weights)
    norm = logsumexp(log_p, axis=1)
    resp = np.exp(log_p - norm[:, None])
    return resp, float(np.sum(norm))


def _floor_eigenvalues(cov: np.ndarray, reg: float) -> np.ndarray:
    # likelihood-optimal covariance subject to eigenvalues >= reg
    vals, vecs = np.linalg.eigh(cov)
    vals = np.maximum(vals, reg)
    out = (vecs * vals) @ vecs.T
    return 0.5 * (out + out.T)


def _m_step(x, resp, reg):
    nk = resp.sum(axis=0) + 10 * np.finfo(float).eps
    weights = nk / nk.sum()
    means = (resp.T @ x) / nk[:, None]
    covs = np.empty((resp.shape[1], 2, 2))
    for j in range(resp.shape[1]):
        diff = x - means[j]
        covs[j] = _floor_eigenvalues((resp[:, j, None] * diff).T @ diff / nk[j], reg)
    return weights, means, covs


def fit_gmm(points, m: int, rng: np.random.Generator) -> GmmModel:
    """Fit an ``m``-component full-covariance mixture with EM.

    The effective component count is ``min(m, distinct points)``. Seeding is
    k-means++ drawn from ``rng`` over the points in ascending ``(mu, sigma)``
    order, so the fit does not depend on how the points are ordered. EM stops
    once the relative log-likelihood gain drops below 1e-6, or after 100
    iterations. Covariance eigenvalues are floored at ``1e-6`` times the mean
    squared deviation of the data.
    """
    if m < 1:
        raise ValueError(f"component count must be >= 1, got {m}")
    x = _as_points(points)
    x = x[_canonical_order(x)]
    reg = regularization(x)
    distinct = len(np.unique(x, axis=0))
    k = min(m, distinct)

    if k == 1:
        weights = np.ones(1)
        means = x[:1].copy() if distinct == 1 else x.mean(axis=0, keepdims=True)
        diff = x - means[0]
        covs = _floor_eigenvalues(diff.T @ diff / len(x), reg)[None]
        _, ll = _e_step(x, weights, means, covs)
        return GmmModel(weights, means, covs, ll, 1, reg, [ll])

    means = _kmeans_pp(x, k, rng)
    k = len(means)
    diff = x - x.mean(axis=0)
    shared = _floor_eigenvalues(diff.T @ diff / len(x), reg)
    covs = np.repeat(shared[None], k, axis=0)
    weights = np.full(k, 1.0 / k)

    resp, ll = _e_step(x, weights, means, covs)
    trace = [ll]
    n_iter = 0
    for n_iter in range(1, MAX_ITER + 1):
        weights, means, covs = _m_step(x, resp, reg)
        resp, new_ll = _e_step(x, weights, means, covs)
        trace.append(new_ll)
        gain = new_ll - ll
        ll = new_ll
        if gain <= TOL * abs(ll):
            break
    return GmmModel(weights, means, covs, ll, n_iter, reg, trace)


def top_component(model: GmmModel):
    """Index, mean and covariance of the highest-weight component (lowest index on ties)."""
    k = int(np.argmax(model.weights))
    return k, model.means[k], model.covariances[k]


def responsibilities(model: GmmModel, points) -> np.ndarray:
    x = _as_points(points)
    resp, _ = _e_step(x, model.weights, model.means, model.covariances)
    return resp


def smooth_points(points, m: int, rng: np.random.Generator):
    """Replace off-mode points by the top component's mean.

    Returns ``(smoothed, replaced)`` where ``replaced`` is a boolean mask of
    the points that were moved. Points whose most responsible component is
    the top one are copied through untouched.
    """
    x = _as_points(points)
    model = fit_gmm(x, m, rng)
    k_star, mean, _ = top_component(model)
    owner = np.argmax(responsibilities(model, x), axis=1)
    replaced = owner != k_star
    out = x.copy()
    out[replaced, 0] = mean[0]
    out[replaced, 1] = max(mean[1], EPS)
    return out, replaced


def smooth_stats(stats: ChannelStats, m: int, rng: np.random.Generator,
                 return_replaced: bool = False):
    """Smooth diversified-feature statistics toward their dominant style mode.

    Channels assigned to the top mixture component keep their exact
    ``(mu, sigma)``; every other channel takes the component mean, with sigma
    floored at ``EPS``.
    """
    smoothed, replaced = smooth_points(stats.points(), m, rng)
    out = ChannelStats.from_points(smoothed)
    if return_replaced:
        return out, replaced
    return out
