import math

import numpy as np
import pytest

from ubukit.errors import NumericalError
from ubukit.metrics import (
    K0_FACTOR,
    coupling_distance,
    norm_equivalence_constants,
    p_matrix,
    p_norm_sq,
    w2_empirical_1d,
    w2_gaussian,
    w2_gaussian_weighted,
)
from ubukit.models import QuadraticSpec, make_gaussian
from ubukit.ubu import UBUParams, ef_coeffs, noise_cov, noise_chol, stationary_sample
from ubukit.experiments import _Engine


class TestPNorm:
    def test_unit_cross_terms(self):
        assert p_norm_sq(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 3.0

    def test_opposed_unit_vectors(self):
        x = np.array([1.0, 0.0])
        assert p_norm_sq(-x, x) == pytest.approx(1.0)

    def test_matches_dense_weight_matrix(self):
        rng = np.random.default_rng(1)
        d = 5
        weight = p_matrix(d)
        for _ in range(20):
            v = rng.standard_normal(d)
            x = rng.standard_normal(d)
            xi = np.concatenate([v, x])
            assert p_norm_sq(v, x) == pytest.approx(xi @ weight @ xi, abs=1e-12)

    def test_strictly_positive_off_origin(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            v, x = rng.standard_normal((2, 3))
            if np.any(v != 0.0) or np.any(x != 0.0):
                assert p_norm_sq(v, x) > 0.0


class TestEquivalenceConstants:
    def test_values(self):
        lower, upper = norm_equivalence_constants()
        assert upper == pytest.approx(1.6180340, abs=1e-7)
        assert 1.0 / lower == pytest.approx(1.6180340, abs=1e-7)
        assert K0_FACTOR == pytest.approx(math.sqrt(4.0 / (3.0 - math.sqrt(5.0))), rel=1e-15)

    def test_sampled_vectors_never_violate(self):
        lower, upper = norm_equivalence_constants()
        rng = np.random.default_rng(3)
        for _ in range(500):
            v, x = rng.standard_normal((2, 4))
            plain = math.sqrt(float(v @ v + x @ x))
            weighted = math.sqrt(float(p_norm_sq(v, x)))
            assert lower * plain - 1e-12 <= weighted <= upper * plain + 1e-12


class TestW2Gaussian:
    def test_identical_is_zero(self):
        assert w2_gaussian([0.0, 1.0], np.eye(2), [0.0, 1.0], np.eye(2)) == 0.0

    def test_1d_closed_form(self):
        assert w2_gaussian([0.0], [[1.0]], [1.0], [[1.0]]) == pytest.approx(1.0)
        sigma1, sigma2 = 1.5, 0.5
        got = w2_gaussian([0.0], [[sigma1**2]], [2.0], [[sigma2**2]])
        assert got == pytest.approx(math.sqrt(4.0 + (sigma1 - sigma2) ** 2), rel=1e-12)

    def test_commuting_eigenvalue_matching(self):
        got = w2_gaussian([0.0, 0.0], np.diag([1.0, 4.0]), [0.0, 0.0], np.diag([4.0, 1.0]))
        assert got == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            m1, m2 = rng.standard_normal((2, 3))
            a = rng.standard_normal((3, 3))
            b = rng.standard_normal((3, 3))
            c1, c2 = a @ a.T + 0.1 * np.eye(3), b @ b.T + 0.1 * np.eye(3)
            assert w2_gaussian(m1, c1, m2, c2) == pytest.approx(w2_gaussian(m2, c2, m1, c1), rel=1e-9)

    def test_triangle_inequality_on_sampled_triples(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            means = rng.standard_normal((3, 2))
            covs = []
            for _ in range(3):
                a = rng.standard_normal((2, 2))
                covs.append(a @ a.T + 0.05 * np.eye(2))
            d01 = w2_gaussian(means[0], covs[0], means[1], covs[1])
            d12 = w2_gaussian(means[1], covs[1], means[2], covs[2])
            d02 = w2_gaussian(means[0], covs[0], means[2], covs[2])
            assert d02 <= d01 + d12 + 1e-9

    def test_indefinite_covariance_rejected(self):
        with pytest.raises(NumericalError):
            w2_gaussian([0.0, 0.0], np.diag([1.0, -0.5]), [0.0, 0.0], np.eye(2))

    def test_weighted_pure_shift(self):
        d = 3
        weight = p_matrix(d)
        shift = np.concatenate([np.zeros(d), np.full(d, 0.5)])
        got = w2_gaussian_weighted(np.zeros(2 * d), 0.3 * np.eye(2 * d), shift, 0.3 * np.eye(2 * d), weight)
        assert got == pytest.approx(math.sqrt(shift @ weight @ shift), rel=1e-12)


class TestW2Empirical1d:
    def test_identical(self):
        assert w2_empirical_1d([3.0, 1.0, 2.0], [1.0, 2.0, 3.0]) == 0.0

    def test_shifted_pair(self):
        assert w2_empirical_1d([0.0, 1.0], [1.0, 2.0]) == pytest.approx(1.0)

    def test_gaussian_shift_approaches_mean_gap(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal(200_000)
        b = rng.standard_normal(200_000) + 2.0
        oracle = w2_gaussian([0.0], [[1.0]], [2.0], [[1.0]])
        assert w2_empirical_1d(a, b) == pytest.approx(oracle, rel=0.01)

    def test_errors(self):
        with pytest.raises(ValueError, match="empty"):
            w2_empirical_1d([], [])
        with pytest.raises(ValueError, match="match"):
            w2_empirical_1d([1.0], [1.0, 2.0])


class TestCouplingDistance:
    def test_identical_trajectories(self):
        traj = np.random.default_rng(7).standard_normal((5, 3, 2))
        dist, se = coupling_distance(traj, traj, traj, traj)
        np.testing.assert_array_equal(dist, np.zeros(5))
        np.testing.assert_array_equal(se, np.zeros(5))

    def test_single_replica_pointwise(self):
        rng = np.random.default_rng(8)
        va, xa, vb, xb = rng.standard_normal((4, 6, 1, 2))
        dist, se = coupling_distance(va, xa, vb, xb)
        expected = np.sqrt(p_norm_sq(va[:, 0] - vb[:, 0], xa[:, 0] - xb[:, 0]))
        np.testing.assert_allclose(dist, expected, rtol=1e-12)
        assert np.all(np.isnan(se))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            coupling_distance(np.zeros((3, 2, 2)), np.zeros((3, 2, 2)), np.zeros((3, 2, 2)), np.zeros((4, 2, 2)))

    def test_upper_bounds_gaussian_w2(self):
        # coupled UBU chains on a quadratic target have exactly Gaussian
        # marginals, computable through the affine one-step recursion
        spec = QuadraticSpec(eigenvalues=np.array([1.0, 2.0]))
        model = make_gaussian(spec)
        h = 0.1
        params = UBUParams.for_model(model, h=h)
        gamma, c = params.gamma, params.c
        rng = np.random.default_rng(9)
        n_rep, n_steps = 20_000, 25
        d = 2

        x_b, v_b = stationary_sample(model, params, rng, n_rep)
        scale, shift = 1.5, np.array([1.0, -0.5])
        x_a = scale * x_b + shift
        v_a = scale * v_b

        eng = _Engine(model, params)
        chol = noise_chol(gamma, h)
        va = np.empty((n_steps + 1, n_rep, d))
        xa = np.empty_like(va)
        vb = np.empty_like(va)
        xb = np.empty_like(va)
        va[0], xa[0], vb[0], xb[0] = v_a, x_a, v_b, x_b
        for t in range(n_steps):
            noise = rng.standard_normal((1, n_rep, d, 3)) @ chol.T
            eng.run(x_a, v_a, noise)
            eng.run(x_b, v_b, noise)
            va[t + 1], xa[t + 1] = v_a, x_a
            vb[t + 1], xb[t + 1] = v_b, x_b
        dist, se = coupling_distance(va, xa, vb, xb)

        # exact Gaussian marginals through the per-mode affine recursion
        eh, fh = ef_coeffs(gamma, h)
        eh2, fh2 = ef_coeffs(gamma, h / 2.0)
        s = math.sqrt(2.0 * gamma * c)
        cov3 = noise_cov(gamma, h)
        weight = p_matrix(d)
        lam = spec.eigenvalues
        means_a = np.concatenate([np.zeros(d), shift])
        stat_cov = np.diag(np.concatenate([np.full(d, c), 1.0 / lam]))
        cov_a = scale**2 * stat_cov
        cov_b = stat_cov.copy()
        trans = np.zeros((2 * d, 2 * d))
        noise_gain = np.zeros((2 * d, 3 * d))
        for k in range(d):
            a_k = h * eh2 * c * lam[k]
            b_k = h * fh2 * c * lam[k]
            trans[k, k] = eh - a_k * fh2
            trans[k, d + k] = -a_k
            trans[d + k, k] = fh - b_k * fh2
            trans[d + k, d + k] = 1.0 - b_k
            noise_gain[k, 3 * k] = s
            noise_gain[k, 3 * k + 2] = -s * a_k
            noise_gain[d + k, 3 * k + 1] = s
            noise_gain[d + k, 3 * k + 2] = -s * b_k
        step_noise_cov = noise_gain @ np.kron(np.eye(d), cov3) @ noise_gain.T
        for t in range(1, n_steps + 1):
            means_a = trans @ means_a
            cov_a = trans @ cov_a @ trans.T + step_noise_cov
            cov_b = trans @ cov_b @ trans.T + step_noise_cov
            w2 = w2_gaussian_weighted(means_a, cov_a, np.zeros(2 * d), cov_b, weight)
            assert w2 <= dist[t] + 4.0 * se[t]
