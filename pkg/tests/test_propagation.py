import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jumpwass import (
    SJLS,
    Gaussian,
    GaussianMixture,
    IIDProcess,
    MarkovProcess,
    analyze,
    exact_propagate,
    exact_w_series,
    merge_step,
    split_step,
    w2_mixture_to_dirac,
)
from jumpwass.exceptions import ComponentExplosion, DimensionMismatch
from jumpwass.jump_process import occupation_sequence
from jumpwass.propagation import feasible_horizon

from conftest import random_mixture, random_sjls


def brute_force_w2(sys, rho0, k):
    """Oracle: enumerate (j0, j1..jk) with explicit matrix products."""
    pis = occupation_sequence(sys.jump, k) if k else np.empty((0, sys.n_modes))
    total = 0.0
    for j0 in range(rho0.n_components):
        for path in itertools.product(range(sys.n_modes), repeat=k):
            a = np.eye(sys.dim)
            weight = rho0.weights[j0]
            for r, j in enumerate(path):
                a = sys.modes[j] @ a
                weight *= pis[r, j]
            mu = a @ rho0.means[j0]
            cov = a @ rho0.covs[j0] @ a.T
            total += weight * (mu @ mu + np.trace(cov))
    return math.sqrt(total)


def single_mode(a):
    return SJLS(np.asarray(a)[None], IIDProcess([1.0]))


def test_sjls_validation():
    with pytest.raises(DimensionMismatch):
        SJLS(np.zeros((2, 3, 3)), IIDProcess([1.0]))
    with pytest.raises(DimensionMismatch):
        SJLS(np.zeros((2, 3, 2)), IIDProcess([0.5, 0.5]))


class TestSplitMerge:
    def test_split_single_mode(self):
        a = np.array([[0.5, 1.0], [0.0, 0.9]])
        g = Gaussian([1.0, 2.0], np.eye(2))
        out = split_step(g, single_mode(a), [1.0])
        np.testing.assert_array_equal(out.means[0], a @ g.mean)
        np.testing.assert_allclose(out.covs[0], a @ a.T, atol=1e-15)

    def test_split_all_weight_on_first(self):
        sys = SJLS([np.eye(2), 2 * np.eye(2)], IIDProcess([0.5, 0.5]))
        out = split_step(Gaussian([1.0, 1.0], np.eye(2)), sys, [1.0, 0.0])
        np.testing.assert_array_equal(out.weights, [1.0, 0.0])
        np.testing.assert_array_equal(merge_step(out).mean, [1.0, 1.0])

    def test_split_scaling_modes(self):
        sys = SJLS([np.eye(2), 2 * np.eye(2)], IIDProcess([0.5, 0.5]))
        out = split_step(Gaussian([0.0, 0.0], np.eye(2)), sys, [0.5, 0.5])
        np.testing.assert_array_equal(out.covs, [np.eye(2), 4 * np.eye(2)])
        np.testing.assert_array_equal(out.weights, [0.5, 0.5])

    def test_split_dimension_mismatch(self):
        sys = SJLS([np.eye(2)], IIDProcess([1.0]))
        with pytest.raises(DimensionMismatch):
            split_step(Gaussian([0.0], [[1.0]]), sys, [1.0])
        with pytest.raises(DimensionMismatch):
            split_step(Gaussian([0.0, 0.0], np.eye(2)), sys, [0.5, 0.5])

    def test_merge_cases(self):
        g = Gaussian([1.0, 2.0], [[1.0, 0.1], [0.1, 1.0]])
        np.testing.assert_array_equal(merge_step(g.as_mixture()).mean, g.mean)
        h = merge_step(GaussianMixture([0.5, 0.5], [[1.0], [-1.0]], [[[0.0]], [[0.0]]]))
        assert (h.mean[0], h.cov[0, 0]) == (0.0, 1.0)


class TestAnalyze:
    def test_single_stable_mode_closed_form(self):
        a = np.array([[0.6, 0.3], [-0.2, 0.7]])
        mu, cov = np.array([1.0, -2.0]), np.array([[0.5, 0.1], [0.1, 0.3]])
        traj = analyze(single_mode(a), Gaussian(mu, cov), 30)
        ak = np.eye(2)
        for k in range(31):
            expected = math.sqrt(np.sum((ak @ mu) ** 2) + np.trace(ak @ cov @ ak.T))
            assert traj.w_hat[k] == pytest.approx(expected, rel=1e-12)
            ak = a @ ak
        assert traj.w_hat[-1] < 1e-3 * traj.w_hat[0]

    def test_identity_modes_constant(self, rng):
        sys = SJLS([np.eye(3)] * 3, MarkovProcess(np.full((3, 3), 1 / 3), [1.0, 0.0, 0.0]))
        rho0 = random_mixture(rng, 3, 2)
        traj = analyze(sys, rho0, 20)
        np.testing.assert_allclose(traj.w_hat, traj.w_hat[0], rtol=1e-13)

    def test_step_zero(self, rng):
        sys = random_sjls(rng, 2, 3)
        rho0 = random_mixture(rng, 3, 3)
        traj = analyze(sys, rho0, 0)
        assert len(traj) == 1
        assert traj.w_hat[0] == w2_mixture_to_dirac(rho0)
        np.testing.assert_array_equal(traj.pi[0], sys.jump.pi0)

    def test_records(self, rng):
        sys = random_sjls(rng, 3, 2, kind="markov")
        traj = analyze(sys, random_mixture(rng, 2, 1), 5)
        steps = traj.steps
        assert [s.k for s in steps] == list(range(6))
        np.testing.assert_allclose(traj.pi[1:], occupation_sequence(sys.jump, 5))
        assert all(s.w_hat >= 0 for s in steps)
        assert traj.peak_components == 3

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            analyze(random_sjls(rng, 2, 3), random_mixture(rng, 2, 1), 3)

    def test_matches_exact_markov(self, rng):
        sys = random_sjls(rng, 2, 2, kind="markov")
        rho0 = random_mixture(rng, 2, 2)
        traj = analyze(sys, rho0, 8)
        for k in range(9):
            exact = w2_mixture_to_dirac(exact_propagate(sys, rho0, k))
            assert traj.w_hat[k] == pytest.approx(exact, rel=1e-10)


class TestExact:
    def test_zero_steps(self, rng):
        rho0 = random_mixture(rng, 2, 2)
        assert exact_propagate(random_sjls(rng, 2, 2), rho0, 0) is rho0

    def test_single_mode(self):
        a = np.array([[1.1, 0.2], [0.0, 0.8]])
        g = Gaussian([1.0, 1.0], [[0.2, 0.05], [0.05, 0.1]])
        out = exact_propagate(single_mode(a), g, 3)
        a3 = a @ a @ a
        assert out.n_components == 1
        np.testing.assert_allclose(out.means[0], a3 @ g.mean, rtol=1e-14)
        np.testing.assert_allclose(out.covs[0], a3 @ g.cov @ a3.T, rtol=1e-14)

    def test_iid_component_count_and_equidistance(self, rng):
        sys = SJLS(
            [np.array([[0.5, 0.2], [-0.1, 0.8]]), np.array([[0.9, -0.3], [0.4, 0.2]])],
            IIDProcess([0.5, 0.5]),
        )
        rho0 = Gaussian([1.0, -1.0], [[0.3, 0.1], [0.1, 0.4]])
        out = exact_propagate(sys, rho0, 3)
        assert out.n_components == 8
        assert w2_mixture_to_dirac(out) == pytest.approx(analyze(sys, rho0, 3).w_hat[3], rel=1e-10)

    def test_path_order_and_weights(self):
        a, b = np.diag([2.0, 1.0]), np.diag([1.0, 3.0])
        sys = SJLS([a, b], MarkovProcess([[0.1, 0.9], [0.6, 0.4]], [1.0, 0.0]))
        rho0 = GaussianMixture([0.25, 0.75], [[1.0, 1.0], [-1.0, 0.0]], [np.zeros((2, 2))] * 2)
        out = exact_propagate(sys, rho0, 2)
        pis = occupation_sequence(sys.jump, 2)
        mats = [a, b]
        idx = 0
        for j0 in range(2):
            for j1, j2 in itertools.product(range(2), repeat=2):
                assert out.weights[idx] == pytest.approx(rho0.weights[j0] * pis[0, j1] * pis[1, j2], rel=1e-15)
                np.testing.assert_array_equal(out.means[idx], mats[j2] @ mats[j1] @ rho0.means[j0])
                idx += 1

    def test_explosion(self, rng):
        sys = random_sjls(rng, 3, 2)
        with pytest.raises(ComponentExplosion) as info:
            exact_propagate(sys, random_mixture(rng, 2, 2), 13, component_limit=10**6)
        assert info.value.required == 2 * 3**13
        with pytest.raises(ComponentExplosion):
            exact_w_series(sys, random_mixture(rng, 2, 1), 20)

    def test_feasible_horizon(self, rng):
        sys = random_sjls(rng, 6, 2)
        rho0 = random_mixture(rng, 2, 2)
        assert feasible_horizon(sys, rho0, 8, 2_000_000) == 7
        assert feasible_horizon(sys, rho0, 3, 2_000_000) == 3
        assert feasible_horizon(sys, rho0, 3, 1) == -1

    def test_series_zero_horizon(self, rng):
        rho0 = random_mixture(rng, 2, 3)
        np.testing.assert_array_equal(exact_w_series(random_sjls(rng, 2, 2), rho0, 0), [w2_mixture_to_dirac(rho0)])

    def test_series_single_mode_matches_analyze(self):
        a = np.array([[0.9, 0.4], [-0.3, 0.7]])
        rho0 = Gaussian([0.3, -0.4], [[0.2, 0.0], [0.0, 0.1]])
        sys = single_mode(a)
        np.testing.assert_allclose(exact_w_series(sys, rho0, 10), analyze(sys, rho0, 10).w_hat, rtol=1e-14)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 2), st.integers(0, 5), st.integers(0, 2**32 - 1))
    def test_series_matches_brute_force(self, m, n, m0, k, seed):
        rng = np.random.default_rng(seed)
        sys = random_sjls(rng, m, n)
        rho0 = random_mixture(rng, n, m0)
        w = exact_w_series(sys, rho0, k)
        assert w[k] == pytest.approx(brute_force_w2(sys, rho0, k), rel=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 2), st.integers(0, 2**32 - 1))
    def test_weights_sum_to_one(self, m, n, m0, seed):
        rng = np.random.default_rng(seed)
        out = exact_propagate(random_sjls(rng, m, n), random_mixture(rng, n, m0), 6 if m == 3 else 8)
        assert out.weights.sum() == pytest.approx(1.0, abs=1e-9)

    def test_chunked_walk_matches_materialized(self, rng, monkeypatch):
        import jumpwass.propagation as prop

        sys = random_sjls(rng, 3, 3)
        rho0 = random_mixture(rng, 3, 2)
        full = [w2_mixture_to_dirac(exact_propagate(sys, rho0, k)) for k in range(7)]
        monkeypatch.setattr(prop, "_BATCH_BYTES", 8 * 9 * 7)  # a handful of components per batch
        np.testing.assert_allclose(exact_w_series(sys, rho0, 6), full, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 2), st.integers(0, 2**32 - 1))
def test_equidistance_property(m, n, m0, seed):
    rng = np.random.default_rng(seed)
    sys = random_sjls(rng, m, n)
    rho0 = random_mixture(rng, n, m0)
    k_max = 8 if m < 3 else 6
    w_hat = analyze(sys, rho0, k_max).w_hat
    exact = exact_w_series(sys, rho0, k_max)
    assert np.all(np.abs(w_hat - exact) <= 1e-10 * np.maximum(1.0, exact))
