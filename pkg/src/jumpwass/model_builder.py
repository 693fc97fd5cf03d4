"""Jump linear systems from networked control loops with random delays.

A loop ``x(k+1) = A x(k) + B F(tau, d) x(k - tau - d)`` with sensor-to-controller
delay ``tau`` and controller-to-actuator delay ``d`` is rewritten as a
delay-free system on the stacked state ``z(k) = [x(k); x(k-1); ...; x(k-D)]``,
``D = tau_max + d_max``. Each delay pair becomes one mode.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch
from .gaussian_mixture import GaussianMixture, as_mixture
from .jump_process import IIDProcess, MarkovProcess, compose_independent
from .propagation import SJLS


@dataclass(frozen=True, eq=False)
class DelayedNCS:
    """Plant, input matrix and delay-scheduled gains.

    ``gains`` maps ``(tau, d)`` to a length-n row. Arrays keep their dtype so
    exact (e.g. ``fractions.Fraction``) arithmetic passes through unchanged.
    """

    plant: np.ndarray
    input: np.ndarray
    gains: dict
    tau_max: int
    d_max: int
    sample_time: float = 0.1

    def __post_init__(self):
        a = np.asarray(self.plant)
        b = np.asarray(self.input).reshape(-1, 1)
        n = a.shape[0]
        if a.ndim != 2 or a.shape != (n, n):
            raise DimensionMismatch(f"plant must be square, got shape {a.shape}")
        if b.shape[0] != n:
            raise DimensionMismatch(f"input has {b.shape[0]} rows, plant has {n}")
        if self.tau_max < 0 or self.d_max < 0:
            raise ValueError("delay bounds must be nonnegative")
        gains = {}
        for pair in self.pairs:
            if pair not in self.gains:
                raise DimensionMismatch(f"missing gain for delay pair {pair}")
            f = np.asarray(self.gains[pair]).reshape(-1)
            if f.size != n:
                raise DimensionMismatch(f"gain {pair} has {f.size} entries, expected {n}")
            gains[pair] = f
        object.__setattr__(self, "plant", a)
        object.__setattr__(self, "input", b)
        object.__setattr__(self, "gains", gains)

    @property
    def n(self):
        return self.plant.shape[0]

    @property
    def depth(self):
        return self.tau_max + self.d_max

    @property
    def pairs(self):
        """Delay pairs in mode order: tau-major, d-minor."""
        return [(t, d) for t in range(self.tau_max + 1) for d in range(self.d_max + 1)]


def augment_modes(ncs):
    """Stacked-state mode matrices, shape (|tau|*|d|, n*(D+1), n*(D+1))."""
    n, depth = ncs.n, ncs.depth
    size = n * (depth + 1)
    dtype = np.result_type(ncs.plant, ncs.input, *ncs.gains.values())
    out = []
    for tau, d in ncs.pairs:
        z = np.zeros((size, size), dtype=dtype)
        z[:n, :n] = ncs.plant
        lag = tau + d
        z[:n, lag * n:(lag + 1) * n] += ncs.input @ ncs.gains[(tau, d)][None, :]
        for i in range(1, depth + 1):
            z[i * n:(i + 1) * n, (i - 1) * n:i * n] = np.eye(n, dtype=dtype)
        out.append(z)
    return np.array(out)


@dataclass(frozen=True, eq=False)
class AugmentedSJLS(SJLS):
    pairs: list = field(default_factory=list)
    plant_dim: int = 0
    depth: int = 0

    @property
    def mode_index(self):
        return {pair: j for j, pair in enumerate(self.pairs)}

    def lift(self, rho):
        return lift_constant_history(rho, self.depth)


def augment(ncs, jump):
    """Augmented SJLS for ``ncs`` switched by ``jump`` over its delay pairs."""
    return AugmentedSJLS(
        augment_modes(ncs).astype(float),
        jump,
        pairs=ncs.pairs,
        plant_dim=ncs.n,
        depth=ncs.depth,
    )


def lift_constant_history(rho, depth):
    """Initial density of ``[x(0); ...; x(0)]`` for ``x(0) ~ rho``.

    Each lifted component has mean ``1 (x) mu`` and covariance
    ``(1 1^T) (x) Sigma``, i.e. fully correlated history blocks.
    """
    rho = as_mixture(rho)
    ones = np.ones((depth + 1, depth + 1))
    return GaussianMixture(
        rho.weights,
        np.tile(rho.means, (1, depth + 1)),
        np.array([np.kron(ones, c) for c in rho.covs]),
    )


# Inverted pendulum on a cart, sampled at 0.1 s, with gains for every delay pair.
PENDULUM_A = np.array([
    [1.0, 0.1, -0.0166, -0.0005],
    [0.0, 1.0, -0.3374, -0.0166],
    [0.0, 0.0, 1.0996, 0.1033],
    [0.0, 0.0, 2.0247, 1.0996],
])
PENDULUM_B = np.array([0.0045, 0.0896, -0.0068, -0.1377])
PENDULUM_GAINS = {
    (0, 0): [0.1690, 0.8824, 19.5824, 4.3966],
    (0, 1): [0.5625, 0.6259, 24.8814, 5.1886],
    (1, 0): [-0.3076, 0.9370, 12.0069, 5.9910],
    (1, 1): [-0.0097, 0.7109, 15.2518, 7.3154],
    (2, 0): [-0.3212, 1.0528, 11.9330, 6.3809],
    (2, 1): [0.0427, 0.8640, 16.0874, 7.8361],
}
PENDULUM_LAMBDA = np.array([
    [0.5, 0.5, 0.0],
    [0.3, 0.6, 0.1],
    [0.3, 0.6, 0.1],
])
PENDULUM_OMEGA = np.array([
    [0.2, 0.8],
    [0.5, 0.5],
])
PENDULUM_PI_SC = np.array([0.7, 0.2, 0.1])
PENDULUM_PI_CA = np.array([0.5, 0.5])
PENDULUM_PI0 = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
PENDULUM_MU0 = np.array([0.0, 0.0, 0.1, 0.0])
PENDULUM_SIGMA0 = 0.25**2 * np.eye(4)
PENDULUM_MOG_WEIGHTS = np.array([0.5, 0.5])
PENDULUM_MOG_MEANS = np.array([
    [0.5, 0.25, -0.12, 0.05],
    [-0.4, 0.35, 0.07, -0.1],
])
PENDULUM_MOG_COVS = np.array([0.25**2 * np.eye(4), 0.3**2 * np.eye(4)])


def pendulum_ncs():
    return DelayedNCS(PENDULUM_A, PENDULUM_B, PENDULUM_GAINS, tau_max=2, d_max=1, sample_time=0.1)


def pendulum_jump(kind):
    if kind == "markov":
        sc = MarkovProcess(PENDULUM_LAMBDA, [1.0, 0.0, 0.0])
        ca = MarkovProcess(PENDULUM_OMEGA, [1.0, 0.0])
        composed = compose_independent(sc, ca)
        return composed
    if kind == "iid":
        return compose_independent(IIDProcess(PENDULUM_PI_SC), IIDProcess(PENDULUM_PI_CA))
    raise ValueError(f"unknown jump kind {kind!r}; expected 'markov' or 'iid'")


def pendulum_initial(kind):
    """Initial density of the 4-dimensional pendulum state (not lifted)."""
    if kind == "gaussian":
        return GaussianMixture([1.0], [PENDULUM_MU0], [PENDULUM_SIGMA0])
    if kind == "mog":
        return GaussianMixture(PENDULUM_MOG_WEIGHTS, PENDULUM_MOG_MEANS, PENDULUM_MOG_COVS)
    raise ValueError(f"unknown initial density {kind!r}; expected 'gaussian' or 'mog'")


def pendulum_preset(jump_kind="markov", init_kind="gaussian"):
    """The 6-mode, 16-dimensional pendulum loop and its lifted initial density."""
    sys = augment(pendulum_ncs(), pendulum_jump(jump_kind))
    return sys, sys.lift(pendulum_initial(init_kind))


PRESETS = {
    f"pendulum-{j}-{i}": (j, i)
    for j in ("markov", "iid")
    for i in ("gaussian", "mog")
}


def load_preset(name):
    try:
        jump_kind, init_kind = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
    return pendulum_preset(jump_kind, init_kind)
