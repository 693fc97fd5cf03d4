"""Uncertainty propagation through stochastic jump linear systems.

Two engines are provided. :func:`exact_propagate` enumerates every mode path
and keeps the full mixture, whose size grows as ``m**k``. :func:`analyze`
runs split-and-merge: each step pushes one Gaussian through every mode and
moment-matches the result back to one Gaussian, so memory stays constant
while the distance to the origin Dirac is reproduced exactly.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import ComponentExplosion, DimensionMismatch, NumericalFailure
from .gaussian_mixture import Gaussian, GaussianMixture, as_mixture, moment_match_arrays
from .jump_process import check_occupation, occupation_sequence
from .numerics import symmetrize
from .wasserstein import w2_mixture_to_dirac, w2_squared_to_dirac_arrays

DEFAULT_COMPONENT_LIMIT = 10**6
# Memory budget for one batch of covariances in the chunked exact oracle.
_BATCH_BYTES = 64 * 2**20


@dataclass(frozen=True, eq=False)
class SJLS:
    """Mode matrices ``modes[j]`` switched by a jump process over the same modes."""

    modes: np.ndarray
    jump: object

    def __post_init__(self):
        modes = np.array(self.modes, dtype=float)
        if modes.ndim == 2:
            modes = modes[None]
        if modes.ndim != 3 or modes.shape[0] < 1 or modes.shape[1] != modes.shape[2]:
            raise DimensionMismatch(f"modes must have shape (m, n, n), got {modes.shape}")
        if not np.all(np.isfinite(modes)):
            raise ValueError("mode matrices must be finite")
        if self.jump.n_modes != modes.shape[0]:
            raise DimensionMismatch(f"{modes.shape[0]} mode matrices but the jump process has {self.jump.n_modes} modes")
        modes.setflags(write=False)
        object.__setattr__(self, "modes", modes)

    @property
    def n_modes(self):
        return self.modes.shape[0]

    @property
    def dim(self):
        return self.modes.shape[1]


class TrajectoryStep(NamedTuple):
    k: int
    pi: np.ndarray
    merged: Gaussian
    w_hat: float


@dataclass(frozen=True, eq=False)
class WTrajectory:
    """Split-and-merge output, one row per time step ``k = 0 .. k_max``.

    ``pi[0]`` is the seed distribution; ``pi[k]`` for ``k >= 1`` weighted the
    jump into step ``k``.
    """

    pi: np.ndarray
    means: np.ndarray
    covs: np.ndarray
    w_hat: np.ndarray
    peak_components: int = field(default=0)

    @property
    def k(self):
        return np.arange(self.w_hat.size)

    def __len__(self):
        return self.w_hat.size

    def merged(self, k):
        return Gaussian(self.means[k], self.covs[k])

    def step(self, k):
        return TrajectoryStep(int(k), self.pi[k], self.merged(k), float(self.w_hat[k]))

    @property
    def steps(self):
        return [self.step(k) for k in range(len(self))]


def _check_rho0(sys, rho0):
    rho0 = as_mixture(rho0)
    if rho0.dim != sys.dim:
        raise DimensionMismatch(f"initial density has dimension {rho0.dim}, system has {sys.dim}")
    return rho0


def _split_arrays(modes, mean, cov):
    means = modes @ mean
    covs = symmetrize(modes @ cov @ np.swapaxes(modes, 1, 2))
    return means, covs


def split_step(g, sys, pi_next):
    """Push ``g`` through every mode; weight mode ``j`` by ``pi_next[j]``."""
    pi_next = check_occupation(pi_next, "pi_next")
    if pi_next.size != sys.n_modes:
        raise DimensionMismatch(f"pi_next has {pi_next.size} entries for {sys.n_modes} modes")
    if g.dim != sys.dim:
        raise DimensionMismatch(f"Gaussian has dimension {g.dim}, system has {sys.dim}")
    means, covs = _split_arrays(sys.modes, g.mean, g.cov)
    return GaussianMixture(pi_next, means, covs)


def merge_step(m):
    m = as_mixture(m)
    mu, cov = moment_match_arrays(m.weights, m.means, m.covs)
    return Gaussian(mu, cov)


def analyze(sys, rho0, k_max):
    """Split-and-merge propagation of ``rho0`` for ``k_max`` steps.

    Returns a :class:`WTrajectory` whose ``w_hat[k]`` is the Wasserstein
    distance from the merged Gaussian at step ``k`` to the origin Dirac.
    At most ``sys.n_modes`` split components are alive at any time.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    rho0 = _check_rho0(sys, rho0)
    pis = occupation_sequence(sys.jump, k_max, include_seed=True)
    n = sys.dim
    means = np.empty((k_max + 1, n))
    covs = np.empty((k_max + 1, n, n))
    w_hat = np.empty(k_max + 1)

    mu, cov = moment_match_arrays(rho0.weights, rho0.means, rho0.covs)
    means[0], covs[0] = mu, cov
    w_hat[0] = w2_mixture_to_dirac(rho0)
    peak = 0
    modes = sys.modes
    for k in range(1, k_max + 1):
        split_means, split_covs = _split_arrays(modes, mu, cov)
        peak = max(peak, split_means.shape[0])
        mu, cov = moment_match_arrays(pis[k], split_means, split_covs)
        means[k], covs[k] = mu, cov
        w_hat[k] = math.sqrt(max(float(mu @ mu + np.trace(cov)), 0.0))
        if not math.isfinite(w_hat[k]):
            raise NumericalFailure(f"moments overflowed at step {k}")
    return WTrajectory(pis, means, covs, w_hat, peak)


def required_components(sys, rho0, k):
    return as_mixture(rho0).n_components * sys.n_modes**k


def _guard(sys, rho0, k, component_limit):
    need = required_components(sys, rho0, k)
    if need > component_limit:
        raise ComponentExplosion(need, component_limit)


def feasible_horizon(sys, rho0, k_max, component_limit=DEFAULT_COMPONENT_LIMIT):
    """Largest ``k <= k_max`` the exact engine accepts, or -1 if none."""
    k = k_max
    while k >= 0 and required_components(sys, rho0, k) > component_limit:
        k -= 1
    return k


def _expand(modes, pi, weights, means, covs):
    # Component c at step r becomes components (c, j) at r + 1, c-major.
    w = (weights[:, None] * pi[None, :]).reshape(-1)
    mu = np.einsum("jab,cb->cja", modes, means).reshape(-1, means.shape[1])
    cv = modes[None] @ covs[:, None] @ np.swapaxes(modes, 1, 2)[None]
    cv = symmetrize(cv).reshape(-1, *covs.shape[1:])
    return w, mu, cv


def exact_propagate(sys, rho0, k, component_limit=DEFAULT_COMPONENT_LIMIT):
    """Exact state density at step ``k`` by full mode-path enumeration.

    Component order: initial component index is the most significant digit,
    followed by modes ``j_1 .. j_k`` in lexicographic order. Each weight is
    ``alpha_{j0} * prod_r pi_{j_r}(r)``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    rho0 = _check_rho0(sys, rho0)
    _guard(sys, rho0, k, component_limit)
    if k == 0:
        return rho0
    pis = occupation_sequence(sys.jump, k)
    w, mu, cv = rho0.weights, rho0.means, rho0.covs
    for r in range(k):
        w, mu, cv = _expand(sys.modes, pis[r], w, mu, cv)
    return GaussianMixture._trusted(w, mu, cv)


def exact_w_series(sys, rho0, k_max, component_limit=DEFAULT_COMPONENT_LIMIT):
    """Exact ``W(k)`` for ``k = 0 .. k_max`` from the enumerated mixtures.

    The path tree is walked depth first in bounded batches, so memory does
    not grow with the number of components; the work still does.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    rho0 = _check_rho0(sys, rho0)
    _guard(sys, rho0, k_max, component_limit)
    pis = occupation_sequence(sys.jump, k_max) if k_max else np.empty((0, sys.n_modes))
    m, n = sys.n_modes, sys.dim
    batch = max(m, _BATCH_BYTES // (8 * n * n))
    partial = [[] for _ in range(k_max + 1)]

    def visit(level, w, mu, cv):
        partial[level].append(float(w @ w2_squared_to_dirac_arrays(mu, cv)))
        if level == k_max:
            return
        step = max(1, batch // m)
        for start in range(0, w.size, step):
            sl = slice(start, start + step)
            visit(level + 1, *_expand(sys.modes, pis[level], w[sl], mu[sl], cv[sl]))

    visit(0, rho0.weights, rho0.means, rho0.covs)
    out = np.array([math.sqrt(max(math.fsum(p), 0.0)) for p in partial])
    if not np.all(np.isfinite(out)):
        raise NumericalFailure("exact moments overflowed")
    return out
