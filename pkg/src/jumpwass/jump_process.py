"""Jump processes described by their mode-occupation probability vectors.

Time indexing: ``pi(0)`` seeds the process; ``pi(r)`` for ``r >= 1`` is the
distribution of the mode applied between ``x(r-1)`` and ``x(r)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ClassMismatch, DimensionMismatch, KernelInvalid, WeightInvalid
from .numerics import STOCHASTIC_TOL, check_stochastic, clean_probabilities, kron


def check_occupation(pi, name="pi"):
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1 or pi.size == 0:
        raise WeightInvalid(f"{name} must be a nonempty vector")
    if not np.all(np.isfinite(pi)) or np.any(pi < 0.0) or np.any(pi > 1.0):
        raise WeightInvalid(f"{name} entries must lie in [0, 1]")
    if abs(pi.sum() - 1.0) > STOCHASTIC_TOL:
        raise WeightInvalid(f"{name} sums to {pi.sum():.15g}, expected 1")
    return pi


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class IIDProcess:
    """Stationary randomized switching: the same ``pi`` at every step."""

    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pi", _frozen(check_occupation(self.pi)))

    @property
    def n_modes(self):
        return self.pi.size

    @property
    def pi0(self):
        return self.pi


@dataclass(frozen=True)
class MarkovProcess:
    transition: np.ndarray
    pi0: np.ndarray

    def __post_init__(self):
        p = check_stochastic(self.transition)
        pi0 = check_occupation(self.pi0, "pi0")
        if pi0.size != p.shape[0]:
            raise DimensionMismatch(f"pi0 has {pi0.size} entries, transition is {p.shape[0]}x{p.shape[0]}")
        object.__setattr__(self, "transition", _frozen(p))
        object.__setattr__(self, "pi0", _frozen(pi0))

    @property
    def n_modes(self):
        return self.pi0.size


@dataclass(frozen=True)
class SemiMarkovProcess:
    """Discrete-time semi-Markov chain.

    ``kernel[i, j, k-1]`` is the probability of leaving mode ``i`` for mode
    ``j`` after a sojourn of exactly ``k`` steps, ``k = 1 .. K_max``.
    """

    kernel: np.ndarray
    pi0: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.kernel, dtype=float)
        if q.ndim != 3 or q.shape[0] != q.shape[1] or q.shape[2] < 1:
            raise KernelInvalid(f"kernel must have shape (m, m, K_max), got {q.shape}")
        if not np.all(np.isfinite(q)) or np.any(q < 0.0):
            raise KernelInvalid("kernel entries must be finite and nonnegative")
        mass = q.sum(axis=(1, 2))
        for i, s in enumerate(mass):
            if abs(s - 1.0) > STOCHASTIC_TOL:
                raise KernelInvalid(f"kernel mass out of mode {i} is {s:.15g}, expected 1")
        pi0 = check_occupation(self.pi0, "pi0")
        if pi0.size != q.shape[0]:
            raise DimensionMismatch(f"pi0 has {pi0.size} entries, kernel has {q.shape[0]} modes")
        object.__setattr__(self, "kernel", _frozen(q))
        object.__setattr__(self, "pi0", _frozen(pi0))

    @property
    def n_modes(self):
        return self.kernel.shape[0]

    @property
    def k_max(self):
        return self.kernel.shape[2]


@dataclass(frozen=True)
class EmbeddedChain:
    """Markov chain on (mode, age) pairs reproducing a semi-Markov law.

    Expanded state ``i * K_max + (a - 1)`` means the process has been in mode
    ``i`` for ``a`` steps, counting the current one.
    """

    chain: MarkovProcess
    n_modes: int
    k_max: int
    mode_of_state: np.ndarray = field(repr=False)

    def marginalize(self, pi_expanded):
        """Sum expanded-state probabilities over ages."""
        pi_expanded = np.asarray(pi_expanded, dtype=float)
        return pi_expanded.reshape(pi_expanded.shape[:-1] + (self.n_modes, self.k_max)).sum(axis=-1)


def step_markov(pi, p):
    pi = np.asarray(pi, dtype=float)
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or pi.shape != (p.shape[0],):
        raise DimensionMismatch(f"cannot multiply pi of shape {pi.shape} by P of shape {p.shape}")
    return clean_probabilities(pi @ p)


def embed_semi_markov(sm):
    """Build the age-indexed Markov embedding of a semi-Markov process.

    From ``(i, a)`` the chain leaves to ``(j, 1)`` with probability
    ``q_ij(a) / S_i(a)`` where ``S_i(a)`` is the mass of sojourns of length
    at least ``a``; otherwise it ages to ``(i, a + 1)``. Unreachable states
    (``S_i(a) == 0``) are made absorbing to keep the matrix stochastic.
    """
    if not isinstance(sm, SemiMarkovProcess):
        raise KernelInvalid("embed_semi_markov expects a SemiMarkovProcess")
    q = sm.kernel
    m, kmax = sm.n_modes, sm.k_max
    exit_mass = q.sum(axis=1)  # (m, K): probability that the sojourn is exactly k
    survival = exit_mass[:, ::-1].cumsum(axis=1)[:, ::-1]  # S_i(a) = P(sojourn >= a)
    size = m * kmax
    p = np.zeros((size, size))
    for i in range(m):
        for a in range(kmax):
            s = i * kmax + a
            if survival[i, a] <= 0.0:
                p[s, s] = 1.0
                continue
            p[s, np.arange(m) * kmax] = q[i, :, a] / survival[i, a]
            if a + 1 < kmax:
                p[s, s + 1] = survival[i, a + 1] / survival[i, a]
            p[s] /= p[s].sum()
    pi0 = np.zeros(size)
    pi0[np.arange(m) * kmax] = sm.pi0
    return EmbeddedChain(
        chain=MarkovProcess(p, pi0),
        n_modes=m,
        k_max=kmax,
        mode_of_state=np.repeat(np.arange(m), kmax),
    )


def occupation_sequence(proc, k_max, include_seed=False):
    """Occupation vectors ``pi(1) .. pi(k_max)`` as an array of shape (k_max, m).

    With ``include_seed`` the seed ``pi(0)`` is prepended.
    """
    if k_max < 0 or (k_max < 1 and not include_seed):
        raise ValueError("k_max must be >= 1")
    if isinstance(proc, IIDProcess):
        out = np.tile(proc.pi, (k_max + 1, 1))
    elif isinstance(proc, MarkovProcess):
        out = _markov_sequence(proc.pi0, proc.transition, k_max)
    elif isinstance(proc, SemiMarkovProcess):
        emb = embed_semi_markov(proc)
        full = _markov_sequence(emb.chain.pi0, emb.chain.transition, k_max)
        out = np.array([clean_probabilities(v) for v in emb.marginalize(full)])
    else:
        raise TypeError(f"unsupported jump process {type(proc).__name__}")
    return out if include_seed else out[1:]


def _markov_sequence(pi0, p, k_max):
    out = np.empty((k_max + 1, pi0.size))
    out[0] = pi0
    for r in range(k_max):
        out[r + 1] = step_markov(out[r], p)
    return out


def compose_independent(a, b):
    """Product process of two independent jump processes of the same class.

    Mode ``(i_a, i_b)`` maps to index ``i_a * m_b + i_b``.
    """
    if isinstance(a, IIDProcess) and isinstance(b, IIDProcess):
        return IIDProcess(clean_probabilities(np.kron(a.pi, b.pi)))
    if isinstance(a, MarkovProcess) and isinstance(b, MarkovProcess):
        p = kron(a.transition, b.transition)
        p = p / p.sum(axis=1, keepdims=True)
        return MarkovProcess(p, clean_probabilities(np.kron(a.pi0, b.pi0)))
    raise ClassMismatch(f"cannot compose {type(a).__name__} with {type(b).__name__}")


def sample_mode(pi, rng):
    """Draw a mode index from ``pi`` by inverse CDF on one uniform."""
    cdf = np.cumsum(pi)
    u = rng.random()
    return min(int(np.searchsorted(cdf, u, side="right")), len(cdf) - 1)
