import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from jumpwass.exceptions import NotPSD
from jumpwass.model_builder import PENDULUM_LAMBDA, PENDULUM_OMEGA
from jumpwass.numerics import check_psd, kron, sym_psd_sqrt, validate_stochastic

small = st.floats(-10, 10, allow_nan=False)


def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_layout():
    out = kron(np.array([[1.0, 2.0]]), np.array([[3.0], [4.0]]))
    assert out.shape == (2, 2)
    assert np.array_equal(out, [[3.0, 6.0], [4.0, 8.0]])


def test_kron_pendulum_entry():
    p = kron(PENDULUM_LAMBDA, PENDULUM_OMEGA)
    assert p.shape == (6, 6)
    assert p[0, 0] == pytest.approx(0.1, abs=1e-15)


def test_kron_rejects_empty():
    with pytest.raises(ValueError):
        kron(np.zeros((0, 2)), np.eye(2))


@given(arrays(float, (2, 3), elements=small), arrays(float, (3, 2), elements=small), small)
def test_kron_bilinear(a, b, alpha):
    np.testing.assert_allclose(kron(alpha * a, b), alpha * kron(a, b), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(kron(a, alpha * b), alpha * kron(a, b), rtol=1e-12, atol=1e-12)


def test_sqrt_identity_and_diagonal():
    np.testing.assert_allclose(sym_psd_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(sym_psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)


def test_sqrt_squares_back():
    s = np.array([[2.0, 1.0], [1.0, 2.0]])
    r = sym_psd_sqrt(s)
    assert np.max(np.abs(r @ r - s)) < 1e-12
    np.testing.assert_array_equal(r, r.T)


def test_sqrt_clamps_round_off():
    s = np.diag([1.0, -1e-13])
    r = sym_psd_sqrt(s)
    assert r[1, 1] == 0.0


def test_sqrt_rejects_indefinite():
    with pytest.raises(NotPSD):
        sym_psd_sqrt(np.diag([1.0, -1e-3]))
    with pytest.raises(NotPSD):
        check_psd(np.array([[1.0, 0.5], [0.0, 1.0]]))


@settings(max_examples=200)
@given(
    arrays(float, (4, 4), elements=st.floats(-3, 3, allow_nan=False)),
    arrays(float, 4, elements=st.floats(0.05, 10.0)),
)
def test_sqrt_recovers_psd_root(w, eig):
    # Eigenvalues bounded away from 0: sqrt amplifies round-off near zero.
    q, _ = np.linalg.qr(w + 7.0 * np.eye(4))
    root = (q * eig) @ q.T
    recovered = sym_psd_sqrt(root @ root)
    assert np.linalg.norm(recovered - root) / np.linalg.norm(root) < 1e-10


def test_validate_stochastic():
    assert validate_stochastic([[0.5, 0.5], [0.3, 0.7]]) is None
    v = validate_stochastic([[0.5, 0.6], [0.3, 0.7]])
    assert v.row == 0
    assert v.deviation == pytest.approx(0.1)
    assert validate_stochastic([[1.2, -0.2], [0.0, 1.0]]).row == 0
    assert validate_stochastic(kron(PENDULUM_LAMBDA, PENDULUM_OMEGA)) is None


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_kron_of_stochastic_is_stochastic(m1, m2, seed):
    rng = np.random.default_rng(seed)
    a = rng.dirichlet(np.ones(m1), size=m1)
    b = rng.dirichlet(np.ones(m2), size=m2)
    assert validate_stochastic(kron(a, b)) is None
