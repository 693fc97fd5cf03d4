"""Sample-path simulation of jump linear systems.

Paths are processed in fixed-size blocks. Each block draws from its own
stream derived from ``(seed, block index)`` and the per-block moments are
merged in block order, so results do not depend on ``n_jobs``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import SemanticsUnsupported, WindowTooLarge
from .gaussian_mixture import as_mixture, sample
from .jump_process import MarkovProcess, SemiMarkovProcess, embed_semi_markov, occupation_sequence
from .propagation import WTrajectory

BLOCK_SIZE = 4096
MONOTONE_SLACK = 1e-12
SEMANTICS = ("independent", "markov-path")


@dataclass(frozen=True)
class SimulationConfig:
    samples: int = 100_000
    horizon: int = 50
    seed: int = 0
    semantics: str = "independent"

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if self.semantics not in SEMANTICS:
            raise ValueError(f"semantics must be one of {SEMANTICS}, got {self.semantics!r}")


class MomentEstimate(NamedTuple):
    k: int
    mean_sq_norm: float
    std_error: float


def _inverse_cdf(cdf, u):
    # cdf is (m,) shared by all paths or (count, m) per path.
    idx = (u[:, None] >= cdf).sum(axis=-1)
    return np.minimum(idx, cdf.shape[-1] - 1)


class _ModeSampler:
    """Draws the applied mode at each step for a block of paths."""

    def __init__(self, sys, cfg):
        jump = sys.jump
        self.markov = cfg.semantics == "markov-path"
        if self.markov:
            if isinstance(jump, MarkovProcess):
                chain, self.mode_of_state = jump, np.arange(jump.n_modes)
            elif isinstance(jump, SemiMarkovProcess):
                emb = embed_semi_markov(jump)
                chain, self.mode_of_state = emb.chain, emb.mode_of_state
            else:
                raise SemanticsUnsupported(f"markov-path sampling needs a Markov or semi-Markov process, got {type(jump).__name__}")
            self.seed_cdf = np.cumsum(chain.pi0)
            self.row_cdf = np.cumsum(chain.transition, axis=1)
        elif cfg.horizon:
            self.step_cdf = np.cumsum(occupation_sequence(jump, cfg.horizon), axis=1)

    def start(self, rng, count):
        if self.markov:
            self.state = _inverse_cdf(self.seed_cdf, rng.random(count))

    def draw(self, rng, r, count):
        u = rng.random(count)
        if self.markov:
            # The first applied mode is one chain transition after the seed.
            self.state = _inverse_cdf(self.row_cdf[self.state], u)
            return self.mode_of_state[self.state]
        return _inverse_cdf(self.step_cdf[r - 1], u)


def _run_block(sys, rho0, cfg, block):
    start = block * BLOCK_SIZE
    count = min(BLOCK_SIZE, cfg.samples - start)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(block,)))
    sampler = _ModeSampler(sys, cfg)
    x = sample(rho0, rng, size=count)
    sampler.start(rng, count)
    sq = np.empty((cfg.horizon + 1, count))
    sq[0] = np.einsum("ij,ij->i", x, x)
    for r in range(1, cfg.horizon + 1):
        modes = sampler.draw(rng, r, count)
        nxt = np.empty_like(x)
        for j in range(sys.n_modes):
            sel = modes == j
            if sel.any():
                nxt[sel] = x[sel] @ sys.modes[j].T
        x = nxt
        sq[r] = np.einsum("ij,ij->i", x, x)
    mean = sq.mean(axis=1)
    m2 = ((sq - mean[:, None]) ** 2).sum(axis=1)
    return count, mean, m2


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2).
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), sa + sb + delta**2 * (na * nb / n)


def simulate(sys, rho0, cfg, n_jobs=1):
    """Estimate ``E|x(k)|^2`` for ``k = 0 .. cfg.horizon`` by sampling.

    With ``independent`` semantics the mode at step ``r`` is drawn from
    ``pi(r)`` independently across time; ``markov-path`` follows the chain
    (or the embedded chain of a semi-Markov process) from a seed drawn from
    ``pi(0)``.
    """
    rho0 = as_mixture(rho0)
    _ModeSampler(sys, cfg)  # fail fast on unsupported semantics
    blocks = range(-(-cfg.samples // BLOCK_SIZE))

    def run(block):
        return _run_block(sys, rho0, cfg, block)

    if n_jobs == 1:
        parts = [run(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(run, blocks))
    total = parts[0]
    for part in parts[1:]:
        total = _merge(total, part)
    n, mean, m2 = total
    var = m2 / (n - 1) if n > 1 else np.zeros_like(m2)
    se = np.sqrt(np.clip(var, 0.0, None) / n)
    return [MomentEstimate(k, float(mean[k]), float(se[k])) for k in range(cfg.horizon + 1)]


def ms_stability_check(traj, window, epsilon):
    """Return ``"stable"`` if the last ``window`` distances are all below
    ``epsilon`` and non-increasing, otherwise ``"inconclusive"``.

    A finite horizon can never prove instability, hence no ``"unstable"``.
    """
    w = np.asarray(traj.w_hat if isinstance(traj, WTrajectory) else traj, dtype=float)
    if w.size == 0:
        raise ValueError("empty trajectory")
    if window < 1 or window > w.size:
        raise WindowTooLarge(f"window {window} does not fit a trajectory of {w.size} steps")
    tail = w[-window:]
    if np.all(tail < epsilon) and np.all(np.diff(tail) <= MONOTONE_SLACK):
        return "stable"
    return "inconclusive"
