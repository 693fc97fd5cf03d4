"""Gaussian and Gaussian-mixture state densities."""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, WeightInvalid
from .numerics import STOCHASTIC_TOL, check_psd, psd_factor, symmetrize


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Gaussian:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if cov.ndim == 0:
            cov = cov.reshape(1, 1)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(f"mean has dimension {mean.size} but cov has shape {cov.shape}")
        check_psd(cov, "cov")
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "cov", _readonly(symmetrize(cov)))

    @property
    def dim(self):
        return self.mean.size

    def as_mixture(self):
        return GaussianMixture([1.0], [self.mean], [self.cov])


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Weighted Gaussian components stored as stacked arrays.

    Attributes
    ----------
    weights : ndarray, shape (K,)
    means : ndarray, shape (K, n)
    covs : ndarray, shape (K, n, n)
    """

    weights: np.ndarray
    means: np.ndarray
    covs: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        means = np.array(self.means, dtype=float)
        covs = np.array(self.covs, dtype=float)
        if means.ndim == 1:
            means = means[:, None]
        if covs.ndim == 1:
            covs = covs[:, None, None]
        k = w.size
        if k < 1:
            raise WeightInvalid("a mixture needs at least one component")
        if means.shape[0] != k or covs.shape[0] != k:
            raise DimensionMismatch(f"{k} weights but {means.shape[0]} means and {covs.shape[0]} covariances")
        n = means.shape[1]
        if covs.shape[1:] != (n, n):
            raise DimensionMismatch(f"covariances must be {n}x{n}, got {covs.shape[1:]}")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0) or np.any(w > 1.0):
            raise WeightInvalid("mixture weights must lie in [0, 1]")
        if abs(w.sum() - 1.0) > STOCHASTIC_TOL:
            raise WeightInvalid(f"mixture weights sum to {w.sum():.15g}, expected 1")
        for j in range(k):
            check_psd(covs[j], f"covs[{j}]")
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "means", _readonly(means))
        object.__setattr__(self, "covs", _readonly(symmetrize(covs)))

    @classmethod
    def _trusted(cls, weights, means, covs):
        # Skips validation; callers guarantee the invariants.
        obj = object.__new__(cls)
        object.__setattr__(obj, "weights", _readonly(weights))
        object.__setattr__(obj, "means", _readonly(means))
        object.__setattr__(obj, "covs", _readonly(covs))
        return obj

    @property
    def dim(self):
        return self.means.shape[1]

    @property
    def n_components(self):
        return self.weights.size

    def component(self, j):
        return Gaussian(self.means[j], self.covs[j])

    def __len__(self):
        return self.n_components


def as_mixture(rho):
    if isinstance(rho, Gaussian):
        return rho.as_mixture()
    if isinstance(rho, GaussianMixture):
        return rho
    raise TypeError(f"expected Gaussian or GaussianMixture, got {type(rho).__name__}")


def pushforward(g, a):
    """Law of ``A X`` for ``X ~ g``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (g.dim, g.dim):
        raise DimensionMismatch(f"matrix of shape {a.shape} cannot act on dimension {g.dim}")
    return Gaussian(a @ g.mean, symmetrize(a @ g.cov @ a.T))


def mix(weights, parts):
    """Mixture selecting ``parts[i]`` with probability ``weights[i]``."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    parts = [as_mixture(p) for p in parts]
    if w.size != len(parts):
        raise WeightInvalid(f"{w.size} weights for {len(parts)} parts")
    if np.any(w < 0.0) or np.any(w > 1.0) or abs(w.sum() - 1.0) > STOCHASTIC_TOL:
        raise WeightInvalid("mixing weights must form a probability vector")
    dims = {p.dim for p in parts}
    if len(dims) != 1:
        raise DimensionMismatch(f"parts have differing dimensions {sorted(dims)}")
    weights = np.concatenate([wi * p.weights for wi, p in zip(w, parts)])
    return GaussianMixture(
        weights / weights.sum(),
        np.concatenate([p.means for p in parts]),
        np.concatenate([p.covs for p in parts]),
    )


def moment_match_arrays(weights, means, covs):
    """Mixture mean and covariance from stacked component arrays."""
    mu = weights @ means
    d = means - mu
    cov = np.einsum("k,kij->ij", weights, covs) + np.einsum("k,ki,kj->ij", weights, d, d)
    return mu, symmetrize(cov)


def moment_match(m):
    """Single Gaussian with the same first two moments as mixture ``m``."""
    m = as_mixture(m)
    mu, cov = moment_match_arrays(m.weights, m.means, m.covs)
    return Gaussian(mu, cov)


def sample(m, rng, size=None):
    """Draw states from a Gaussian or mixture.

    Returns one vector of shape (n,) when ``size`` is None, else (size, n).
    Rank-deficient covariances are handled with an eigendecomposition factor.
    """
    m = as_mixture(m)
    count = 1 if size is None else int(size)
    cdf = np.cumsum(m.weights)
    idx = np.minimum(np.searchsorted(cdf, rng.random(count), side="right"), m.n_components - 1)
    z = rng.standard_normal((count, m.dim))
    out = np.empty((count, m.dim))
    for j in range(m.n_components):
        sel = idx == j
        if sel.any():
            out[sel] = m.means[j] + z[sel] @ psd_factor(m.covs[j]).T
    return out[0] if size is None else out
