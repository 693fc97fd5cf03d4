"""Small dense linear-algebra helpers used throughout the package."""

from typing import NamedTuple, Optional

import numpy as np

from .exceptions import NotPSD, NotStochastic

# Absolute tolerances. Symmetry and PSD checks scale them by max(1, |S|)
# so that large covariances of unstable modes are not rejected on round-off.
SYMMETRY_TOL = 1e-12
PSD_FLOOR = -1e-10
STOCHASTIC_TOL = 1e-12
RANK_TOL = 4 * np.finfo(float).eps


def kron(a, b):
    a = np.atleast_2d(np.asarray(a))
    b = np.atleast_2d(np.asarray(b))
    if a.size == 0 or b.size == 0:
        raise ValueError("kron requires nonempty matrices")
    return np.kron(a, b)


def symmetrize(s):
    return 0.5 * (s + np.swapaxes(s, -1, -2))


def _scale(s):
    return max(1.0, float(np.max(np.abs(s)))) if s.size else 1.0


def check_psd(s, name="matrix"):
    """Validate symmetry and positive semidefiniteness; return eigenvalues."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise NotPSD(f"{name} must be square, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise NotPSD(f"{name} has non-finite entries")
    scale = _scale(s)
    asym = np.max(np.abs(s - s.T)) if s.size else 0.0
    if asym > SYMMETRY_TOL * scale:
        raise NotPSD(f"{name} is not symmetric (max asymmetry {asym:.3g})")
    eig = np.linalg.eigvalsh(symmetrize(s))
    if eig.size and eig[0] < PSD_FLOOR * scale:
        raise NotPSD(f"{name} has eigenvalue {eig[0]:.3g} below the PSD floor")
    return eig


def _clean_spectrum(eig):
    # Eigenvalues within RANK_TOL of the largest are round-off of exact zeros.
    cutoff = RANK_TOL * eig.size * max(float(np.max(np.abs(eig))), 0.0) if eig.size else 0.0
    return np.where(eig > cutoff, eig, 0.0)


def sym_psd_sqrt(s):
    """Unique symmetric PSD square root.

    Negative round-off and eigenvalues indistinguishable from zero are set
    to zero before the square root is taken.
    """
    s = np.asarray(s, dtype=float)
    check_psd(s)
    eig, vec = np.linalg.eigh(symmetrize(s))
    root = (vec * np.sqrt(_clean_spectrum(eig))) @ vec.T
    return symmetrize(root)


def psd_factor(s):
    """Return L with L @ L.T == s, valid for rank-deficient s."""
    eig, vec = np.linalg.eigh(symmetrize(np.asarray(s, dtype=float)))
    return vec * np.sqrt(np.clip(eig, 0.0, None))


class StochasticViolation(NamedTuple):
    row: int
    deviation: float
    reason: str


def validate_stochastic(p) -> Optional[StochasticViolation]:
    """Return None if ``p`` is right stochastic, else the first offending row.

    ``deviation`` is the row sum minus one for sum violations, or the
    offending entry for entries outside [0, 1].
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        return StochasticViolation(-1, float("nan"), f"not square: shape {p.shape}")
    for i, row in enumerate(p):
        if not np.all(np.isfinite(row)):
            return StochasticViolation(i, float("nan"), "non-finite entry")
        bad = (row < 0.0) | (row > 1.0)
        if bad.any():
            return StochasticViolation(i, float(row[bad][0]), "entry outside [0, 1]")
        dev = float(row.sum()) - 1.0
        if abs(dev) > STOCHASTIC_TOL:
            return StochasticViolation(i, dev, f"row sums to {row.sum():.15g}")
    return None


def check_stochastic(p):
    v = validate_stochastic(p)
    if v is not None:
        raise NotStochastic(v.row, v.deviation, f"row {v.row}: {v.reason}")
    return np.asarray(p, dtype=float)


def clean_probabilities(pi):
    """Clamp negative round-off dust to zero and renormalize."""
    pi = np.clip(np.asarray(pi, dtype=float), 0.0, None)
    return pi / pi.sum()
