"""Closed-form order-2 Wasserstein distances.

The reference Dirac measure sits at the origin. A Dirac at ``c`` is the
Gaussian ``N(c, 0)`` and can be passed to :func:`w2_gaussians`.
"""

import math

import numpy as np

from .exceptions import DimensionMismatch
from .gaussian_mixture import as_mixture
from .numerics import sym_psd_sqrt


def w2_gaussians(g1, g2):
    """Distance between two Gaussians.

    The covariance term ``tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2)`` is
    evaluated as ``|S1^1/2 - S2^1/2 Q|_F^2`` with ``Q`` the orthogonal
    polar factor of ``S2^1/2 S1^1/2``. The two are equal, but the
    sum-of-squares form has no cancellation, so nearly equal Gaussians
    give distances near zero rather than ``sqrt(round-off)``.
    """
    if g1.dim != g2.dim:
        raise DimensionMismatch(f"dimensions differ: {g1.dim} vs {g2.dim}")
    root1 = sym_psd_sqrt(g1.cov)
    root2 = sym_psd_sqrt(g2.cov)
    u, _, vt = np.linalg.svd(root1 @ root2)
    residual = root1 - root2 @ (vt.T @ u.T)
    diff = g1.mean - g2.mean
    return math.sqrt(float(diff @ diff) + float(np.sum(residual * residual)))


def w2_squared_to_dirac_arrays(means, covs):
    """Per-component squared distances to the origin Dirac: |mu|^2 + tr(Sigma)."""
    return np.einsum("...i,...i->...", means, means) + np.trace(covs, axis1=-2, axis2=-1)


def w2_gaussian_to_dirac(g):
    return math.sqrt(max(float(w2_squared_to_dirac_arrays(g.mean, g.cov)), 0.0))


def w2_mixture_to_dirac(m):
    """Distance from a mixture to the origin Dirac: sqrt(sum_j a_j W_j^2)."""
    m = as_mixture(m)
    w2 = m.weights @ w2_squared_to_dirac_arrays(m.means, m.covs)
    return math.sqrt(max(float(w2), 0.0))
