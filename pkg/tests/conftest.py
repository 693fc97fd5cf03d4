import numpy as np
import pytest

from jumpwass import GaussianMixture, IIDProcess, MarkovProcess, SJLS

_ACCEPTANCE = []


def random_psd(rng, n, scale=1.0, rank=None):
    w = rng.normal(size=(n, rank or n)) * scale
    return w @ w.T


def random_simplex(rng, m):
    return rng.dirichlet(np.ones(m))


def random_stochastic(rng, m):
    return np.array([random_simplex(rng, m) for _ in range(m)])


def random_mixture(rng, n, k, mean_scale=1.0):
    return GaussianMixture(
        random_simplex(rng, k),
        rng.normal(size=(k, n)) * mean_scale,
        np.array([random_psd(rng, n, rank=rng.integers(1, n + 1)) for _ in range(k)]),
    )


def random_modes(rng, m, n):
    """Mode matrices with spectral radii spread over roughly [0.3, 1.4]."""
    out = []
    for _ in range(m):
        a = rng.normal(size=(n, n))
        radius = max(abs(np.linalg.eigvals(a)))
        out.append(a / radius * rng.uniform(0.3, 1.4))
    return np.array(out)


def random_sjls(rng, m, n, kind=None):
    kind = kind or rng.choice(["iid", "markov"])
    if kind == "iid":
        jump = IIDProcess(random_simplex(rng, m))
    else:
        jump = MarkovProcess(random_stochastic(rng, m), random_simplex(rng, m))
    return SJLS(random_modes(rng, m, n), jump)


def simulate_kernel(q, pi0, steps, n_paths, rng):
    """Directly sample a semi-Markov chain; return mode frequencies per step.

    At a jump from mode i the pair (next mode j, sojourn k) is drawn jointly
    from q[i, j, k-1]; mode i is then occupied for k consecutive steps.
    """
    m, _, kmax = q.shape
    cdf = np.cumsum(q.reshape(m, m * kmax), axis=1)

    def draw(modes):
        u = rng.random(modes.size)
        idx = np.minimum((u[:, None] >= cdf[modes]).sum(axis=1), m * kmax - 1)
        return idx // kmax, idx % kmax + 1

    modes = np.minimum((rng.random(n_paths)[:, None] >= np.cumsum(pi0)).sum(axis=1), m - 1)
    nxt, left = draw(modes)
    freq = np.empty((steps + 1, m))
    freq[0] = np.bincount(modes, minlength=m) / n_paths
    for t in range(1, steps + 1):
        left -= 1
        switch = left == 0
        if switch.any():
            modes[switch] = nxt[switch]
            nxt[switch], left[switch] = draw(modes[switch])
        freq[t] = np.bincount(modes, minlength=m) / n_paths
    return freq


def random_kernel(rng, m, kmax):
    return np.array([rng.dirichlet(np.ones(m * kmax)).reshape(m, kmax) for _ in range(m)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def acceptance_record():
    def record(criterion, passed, detail):
        _ACCEPTANCE.append((criterion, passed, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
