import numpy as np
import pytest

from ubukit.gaussian_chaos import (
    chaos_bound,
    chaos_mean_exact,
    chaos_mean_mc,
    chaos_report,
    erroneous_bound,
    hessian_term_bound,
    v4_moment,
    v4_moment_mc,
)
from ubukit.models import make_product
from ubukit.tensor3 import Tensor3
from ubukit.ubu import UBUParams, stationary_sample


def random_tensor(d, seed):
    return Tensor3(np.random.default_rng(seed).standard_normal((d, d, d)))


class TestExactMean:
    def test_zero(self):
        assert chaos_mean_exact(Tensor3.zeros(3)) == 0.0

    def test_scalar_fourth_moment(self):
        a = 1.7
        assert chaos_mean_exact(Tensor3.from_flat(1, [a])) == pytest.approx(3.0 * a * a, rel=1e-14)

    def test_matches_monte_carlo(self):
        t = random_tensor(2, 4)
        exact = chaos_mean_exact(t)
        mean, se = chaos_mean_mc(t, 1_000_000, seed=42)
        assert abs(mean - exact) <= 4.0 * se

    def test_nonnegative_for_symmetric_modes(self):
        for seed in range(50):
            t = random_tensor(3, seed)
            sym = Tensor3(0.5 * (t.values + t.values.transpose(1, 0, 2)))
            assert chaos_mean_exact(sym) >= -1e-12


class TestMonteCarlo:
    def test_zero_tensor(self):
        mean, se = chaos_mean_mc(Tensor3.zeros(2), 1000, seed=0)
        assert mean == 0.0 and se == 0.0

    def test_diagonal_ones(self):
        t = Tensor3.diagonal([1.0, 1.0, 1.0])
        mean, se = chaos_mean_mc(t, 1_000_000, seed=7)
        assert abs(mean - 9.0) <= 4.0 * se

    def test_deterministic(self):
        t = random_tensor(3, 9)
        assert chaos_mean_mc(t, 50_000, seed=3) == chaos_mean_mc(t, 50_000, seed=3)

    def test_rejects_tiny_sample(self):
        with pytest.raises(ValueError):
            chaos_mean_mc(Tensor3.zeros(2), 1, seed=0)

    def test_converges_to_exact_over_random_tensors(self):
        # statistical: 4-SE tolerance per tensor, fixed seeds
        for seed in range(100):
            t = random_tensor(3, 5_000 + seed)
            exact = chaos_mean_exact(t)
            mean, se = chaos_mean_mc(t, 1_000_000, seed=seed)
            assert abs(mean - exact) <= 4.0 * se


class TestBound:
    def test_zero(self):
        assert chaos_bound(Tensor3.zeros(3)) == 0.0

    def test_diagonal_arithmetic(self):
        t = Tensor3.diagonal([1.0, 2.0, 3.0])
        assert chaos_bound(t) == pytest.approx(81.0, rel=1e-12)
        assert chaos_mean_exact(t) == pytest.approx(42.0, rel=1e-13)

    def test_dominates_exact_mean(self):
        for seed in range(1000):
            d = 2 + seed % 4
            t = random_tensor(d, 20_000 + seed)
            assert chaos_mean_exact(t) <= chaos_bound(t) * (1.0 + 1e-12)

    def test_report_bundle(self):
        t = Tensor3.diagonal([1.0, 2.0, 3.0])
        rep = chaos_report(t, 100_000, seed=1)
        assert rep.exact_mean == pytest.approx(42.0)
        assert rep.bound == pytest.approx(81.0)
        assert abs(rep.mc_mean - 42.0) <= 4.0 * rep.mc_std_error


class TestV4Moment:
    def test_standard_normal(self):
        assert v4_moment(1.0, 1) == 3.0

    def test_printed_formula(self):
        assert v4_moment(2.0, 10) == 480.0

    def test_monte_carlo_d50(self):
        mean, se = v4_moment_mc(1.0, 50, 1_000_000, seed=11)
        assert abs(mean - 2600.0) <= 4.0 * se

    def test_normalized_identity(self):
        for c in (0.5, 1.0, 3.0):
            for d in (1, 7, 40):
                assert v4_moment(c, d) / c**2 == pytest.approx(d * d + 2.0 * d, rel=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError):
            v4_moment(0.0, 3)
        with pytest.raises(ValueError):
            v4_moment(1.0, 0)


class TestErroneousBound:
    def test_boundary_d1(self):
        assert erroneous_bound(1.0, 1.0, 1) == 3.0
        assert v4_moment(1.0, 1) * 1.0**2 == 3.0

    def test_failure_at_d10(self):
        assert erroneous_bound(1.0, 1.0, 10) == 30.0
        assert v4_moment(1.0, 10) == 120.0
        assert erroneous_bound(1.0, 1.0, 10) < v4_moment(1.0, 10)

    def test_zero_l1(self):
        assert erroneous_bound(0.0, 1.0, 5) == 0.0

    def test_always_below_true_moment_for_d_ge_2(self):
        for d in range(2, 30):
            for L1 in (0.5, 1.0, 2.0):
                assert erroneous_bound(L1, 1.3, d) < L1**2 * v4_moment(1.3, d)


class TestHessianTermBound:
    def test_zero(self):
        assert hessian_term_bound(0.0, 1.0, 3) == 0.0

    def test_printed_value(self):
        assert hessian_term_bound(1.0, 1.0, 4) == 12.0

    def test_product_model_at_stationarity(self):
        model = make_product("quadratic_logcosh", 1.0, 1.0, 6)
        params = UBUParams.for_model(model, h=0.1)
        rng = np.random.default_rng(13)
        x, _ = stationary_sample(model, params, rng, 40_000)
        v = np.sqrt(params.c) * rng.standard_normal(x.shape)
        term = model.third_bilinear(x, v, v)
        sq = np.einsum("ni,ni->n", term, term)
        bound = hessian_term_bound(model.L1s, params.c, model.dim)
        se = sq.std(ddof=1) / np.sqrt(sq.size)
        assert sq.mean() <= bound + 4.0 * se
