import math

import numpy as np
import pytest

from ubukit.models import (
    QuadraticSpec,
    RegressionData,
    hessian_tensor,
    load_regression_csv,
    make_gaussian,
    make_logistic,
    make_product,
)
from ubukit.tensor3 import norm_12_3

from oracles import finite_diff_grad, max_abs_on_grid


def rotation_2d(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


class TestQuadraticSpec:
    def test_rejects_nonpositive_eigenvalue(self):
        with pytest.raises(ValueError, match="positive"):
            QuadraticSpec(eigenvalues=np.array([1.0, 0.0]))

    def test_rejects_non_orthogonal_rotation(self):
        with pytest.raises(ValueError, match="orthogonal"):
            QuadraticSpec(eigenvalues=np.array([1.0, 2.0]), rotation=np.ones((2, 2)))


class TestGaussian:
    def test_identity_hessian(self):
        model = make_gaussian(QuadraticSpec(eigenvalues=np.array([1.0, 1.0])))
        x = np.array([1.0, 2.0])
        assert model.value(x) == pytest.approx(2.5)
        np.testing.assert_allclose(model.grad(x), [1.0, 2.0])

    def test_spread_spectrum(self):
        model = make_gaussian(QuadraticSpec(eigenvalues=np.array([1.0, 4.0])))
        x = np.array([1.0, 1.0])
        assert model.value(x) == pytest.approx(2.5)
        np.testing.assert_allclose(model.grad(x), [1.0, 4.0])
        assert (model.m, model.L) == (1.0, 4.0)
        assert model.L1 == 0.0 and model.L1s == 0.0

    def test_rotated_matches_diagonal_through_rotation(self):
        spec = QuadraticSpec(eigenvalues=np.array([1.0, 3.0]), rotation=rotation_2d(0.7))
        model = make_gaussian(spec)
        x = np.array([0.4, -1.2])
        hess = spec.hessian()
        assert model.value(x) == pytest.approx(0.5 * x @ hess @ x)
        np.testing.assert_allclose(model.grad(x), hess @ x, rtol=1e-12)


class TestProduct:
    def test_zero_weight_is_gaussian(self):
        model = make_product("quadratic_logcosh", 0.0, 1.0, 3)
        assert model.L == 1.0 and model.L1s == 0.0

    def test_constants_a1_b1(self):
        model = make_product("quadratic_logcosh", 1.0, 1.0, 2)
        assert model.L == 2.0
        assert model.L1s == pytest.approx(4.0 / (3.0 * math.sqrt(3.0)), rel=1e-14)
        assert model.L1s == pytest.approx(0.7698003589195, rel=1e-10)

    def test_l1s_matches_numeric_third_derivative_peak(self):
        a, b = 0.8, 1.7

        def third(t):
            sech2 = 1.0 / np.cosh(b * t) ** 2
            return -2.0 * a * b**3 * sech2 * np.tanh(b * t)

        peak = max_abs_on_grid(third, 0.0, 8.0 / b)
        model = make_product("quadratic_logcosh", a, b, 2)
        assert model.L1s == pytest.approx(peak, rel=1e-8)

    def test_symmetric_minimum(self):
        model = make_product("quadratic_logcosh", 1.0, 1.0, 3)
        np.testing.assert_array_equal(model.grad(np.zeros(3)), np.zeros(3))

    def test_rejects_unknown_phi(self):
        with pytest.raises(ValueError, match="unknown"):
            make_product("cubic", 1.0, 1.0, 2)

    def test_value_stable_for_large_inputs(self):
        model = make_product("quadratic_logcosh", 1.0, 2.0, 1)
        val = model.value(np.array([500.0]))
        assert np.isfinite(val)
        assert val == pytest.approx(0.5 * 500.0**2 + (1000.0 - math.log(2.0)), rel=1e-12)


class TestLogistic:
    def test_no_rows_is_pure_ridge(self):
        data = RegressionData(features=np.zeros((0, 2)), labels=np.zeros(0), ridge=1.0)
        model = make_logistic(data)
        assert model.L == 1.0 and model.m == 1.0 and model.L1s == 0.0
        x = np.array([1.0, -2.0])
        assert model.value(x) == pytest.approx(2.5)
        np.testing.assert_allclose(model.grad(x), x)

    def test_single_row_hand_values(self):
        data = RegressionData(features=np.array([[1.0, 0.0]]), labels=np.array([1.0]), ridge=1.0)
        model = make_logistic(data)
        x = np.zeros(2)
        assert model.value(x) == pytest.approx(math.log(2.0))
        np.testing.assert_allclose(model.grad(x), [-0.5, 0.0], atol=1e-15)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(8)
        data = RegressionData(features=rng.standard_normal((12, 3)),
                              labels=np.sign(rng.standard_normal(12)), ridge=0.7)
        model = make_logistic(data)
        for _ in range(20):
            x = rng.standard_normal(3)
            fd = finite_diff_grad(model.value, x)
            np.testing.assert_allclose(model.grad(x), fd, rtol=1e-5, atol=1e-7)

    def test_conservative_flag(self):
        rng = np.random.default_rng(9)
        data = RegressionData(features=rng.standard_normal((5, 2)),
                              labels=np.sign(rng.standard_normal(5)), ridge=1.0)
        model = make_logistic(data)
        assert model.l1s_conservative
        assert model.L1 == model.L1s > 0.0


class TestRegressionCsv:
    def test_loads_and_maps_labels(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("label,x1,x2\n0,1.0,2.0\n1,-1.0,0.5\n")
        data = load_regression_csv(path, ridge=0.5)
        np.testing.assert_array_equal(data.labels, [-1.0, 1.0])
        assert data.features.shape == (2, 2)
        assert data.ridge == 0.5

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("label,x1\n1,2.0\n1,2.0,3.0\n")
        with pytest.raises(ValueError, match="line 3"):
            load_regression_csv(path, ridge=1.0)

    def test_bad_label_reports_line(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("label,x1\n2,1.0\n")
        with pytest.raises(ValueError, match="line 2"):
            load_regression_csv(path, ridge=1.0)

    def test_requires_label_header(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("y,x1\n1,1.0\n")
        with pytest.raises(ValueError, match="label"):
            load_regression_csv(path, ridge=1.0)

    def test_alternate_delimiter(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("label;x1\n1;3.5\n")
        data = load_regression_csv(path, ridge=1.0, delimiter=";")
        assert data.features[0, 0] == 3.5


class TestHessianTensor:
    def test_gaussian_exactly_zero(self):
        model = make_gaussian(QuadraticSpec(eigenvalues=np.array([1.0, 2.0])))
        t = hessian_tensor(model, np.array([0.3, -0.4]))
        np.testing.assert_array_equal(t.values, np.zeros((2, 2, 2)))

    def test_product_origin_vanishes(self):
        model = make_product("quadratic_logcosh", 1.0, 1.0, 2)
        t = hessian_tensor(model, np.zeros(2))
        np.testing.assert_allclose(t.values, np.zeros((2, 2, 2)), atol=1e-14)

    def test_product_d1_matches_phi_second_derivative_difference(self):
        a, b, x0 = 1.0, 1.0, 0.5
        model = make_product("quadratic_logcosh", a, b, 1)
        t = hessian_tensor(model, np.array([x0]))

        def phi2(t_):
            return 1.0 + a * b * b / np.cosh(b * t_) ** 2

        step = 1e-6
        fd = (phi2(x0 + step) - phi2(x0 - step)) / (2.0 * step)
        assert t.values[0, 0, 0] == pytest.approx(fd, rel=1e-7)

    def test_finite_difference_path_matches_analytic(self):
        model = make_product("quadratic_logcosh", 0.9, 1.3, 3)

        class NoThird:
            third_bilinear = None

            def __init__(self, inner):
                self.inner = inner

            def __getattr__(self, name):
                return getattr(self.inner, name)

        x = np.array([0.2, -0.7, 1.1])
        analytic = hessian_tensor(model, x)
        fd = hessian_tensor(NoThird(model), x)
        np.testing.assert_allclose(fd.values, analytic.values, atol=1e-7)

    def test_dimension_guard(self):
        model = make_product("quadratic_logcosh", 1.0, 1.0, 65)
        with pytest.raises(ValueError, match="capped"):
            hessian_tensor(model, np.zeros(65))

    def test_symmetric_modes_12(self):
        rng = np.random.default_rng(3)
        data = RegressionData(features=rng.standard_normal((6, 3)),
                              labels=np.sign(rng.standard_normal(6)), ridge=1.0)
        model = make_logistic(data)
        t = hessian_tensor(model, rng.standard_normal(3))
        np.testing.assert_allclose(t.values, t.values.transpose(1, 0, 2), atol=1e-12)


class TestModelInvariants:
    @pytest.fixture(params=["gaussian", "product", "logistic"])
    def model(self, request):
        rng = np.random.default_rng(77)
        if request.param == "gaussian":
            return make_gaussian(QuadraticSpec(eigenvalues=np.array([1.0, 2.5, 4.0]),
                                               rotation=None))
        if request.param == "product":
            return make_product("quadratic_logcosh", 1.2, 0.8, 3)
        data = RegressionData(features=rng.standard_normal((10, 3)),
                              labels=np.sign(rng.standard_normal(10)), ridge=0.6)
        return make_logistic(data)

    def test_gradient_consistency(self, model):
        rng = np.random.default_rng(5)
        for _ in range(10):
            x = rng.standard_normal(model.dim)
            fd = finite_diff_grad(model.value, x)
            np.testing.assert_allclose(model.grad(x), fd, rtol=1e-5, atol=1e-7)

    def test_hessian_action_consistency(self, model):
        rng = np.random.default_rng(6)
        for _ in range(10):
            x = rng.standard_normal(model.dim)
            w = rng.standard_normal(model.dim)
            step = 1e-6
            fd = (model.grad(x + step * w) - model.grad(x - step * w)) / (2.0 * step)
            np.testing.assert_allclose(model.hessian_vec(x, w), fd, rtol=1e-4, atol=1e-6)

    def test_eigenvalue_sandwich(self, model):
        rng = np.random.default_rng(7)
        for _ in range(100):
            x = rng.standard_normal(model.dim)
            w = rng.standard_normal(model.dim)
            quad = float(w @ model.hessian_vec(x, w))
            nsq = float(w @ w)
            assert model.m * nsq * (1.0 - 1e-10) <= quad <= model.L * nsq * (1.0 + 1e-10)

    def test_constant_ordering(self, model):
        assert model.m <= model.L
        assert model.L1 <= model.L1s <= math.sqrt(model.dim) * model.L1 + 1e-15


class TestAssumptionRealized:
    def test_product_hessian_tensor_within_l1s(self):
        model = make_product("quadratic_logcosh", 1.0, 1.0, 5)
        rng = np.random.default_rng(10)
        for _ in range(100):
            x = rng.standard_normal(5)
            assert norm_12_3(hessian_tensor(model, x)) <= model.L1s * (1.0 + 1e-10)
