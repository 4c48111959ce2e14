import math

import numpy as np
import pytest

import oracles
from binmf.errors import BoundsError, DomainError, NumericError, ShapeError
from binmf.kernels import KernelSpec
from binmf.matrix import Dataset, NonNegMatrix
from binmf.objectives import (eval_aggregated, eval_j_feature, eval_j_input, grad_a, grad_e,
                              gradient_a, gradient_e, gradient_e_gaussian)

G1 = KernelSpec.gaussian(1.0)
X2 = np.eye(2)
E2 = np.array([[0.5], [0.5]])
A2 = np.array([[1.0, 1.0]])


def random_instance(rng, L=4, N=2, T=5):
    return (rng.uniform(0.1, 1, (L, T)), rng.uniform(0.1, 1, (L, N)), rng.uniform(0.1, 1, (N, T)))


class TestJInput:
    def test_perfect(self):
        E = np.array([[1.0, 0.2], [0.3, 0.0]])
        A = np.array([[0.5, 1.0, 0.0], [2.0, 0.1, 1.0]])
        assert eval_j_input(E @ A, E, A) == 0.0

    def test_seed_instance(self):
        assert eval_j_input(X2, E2, A2) == 0.5

    def test_accepts_typed_inputs(self):
        assert eval_j_input(Dataset(NonNegMatrix(X2)), NonNegMatrix(E2), NonNegMatrix(A2)) == 0.5

    def test_quadratic_homogeneity(self):
        rng = np.random.default_rng(0)
        X, E, A = random_instance(rng)
        base = eval_j_input(X, E, A)
        assert eval_j_input(3 * X, 3 * E, A) == pytest.approx(9 * base, rel=1e-13)

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(1)
        X, E, A = random_instance(rng)
        assert eval_j_input(X, E, A) == pytest.approx(oracles.j_input(X, E, A), rel=1e-13)

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            eval_j_input(X2, E2, np.ones((1, 3)))


class TestJFeature:
    def test_exact_representation(self):
        x = np.array([[0.3, 0.3], [0.8, 0.8]])
        e = np.array([[0.3], [0.8]])
        assert eval_j_feature(x, e, np.ones((1, 2)), G1) == 0.0

    def test_single_pixel(self):
        v = eval_j_feature([[1.0], [0.0]], [[0.5], [0.5]], [[1.0]], G1)
        assert v == pytest.approx(0.5 * (2 - 2 * math.exp(-0.25)), rel=1e-14)
        assert v == pytest.approx(0.221199, abs=1e-6)

    def test_zero_abundances(self):
        rng = np.random.default_rng(2)
        X, E, _ = random_instance(rng, T=7)
        assert eval_j_feature(X, E, np.zeros((2, 7)), KernelSpec.gaussian(0.7)) == 3.5

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(3)
        X, E, A = random_instance(rng)
        assert eval_j_feature(X, E, A, G1) == pytest.approx(
            oracles.j_feature_gauss(X, E, A, 1.0), rel=1e-13)

    def test_per_sample_terms_nonnegative(self):
        from binmf.objectives import feature_residuals
        rng = np.random.default_rng(4)
        for _ in range(20):
            X, E, A = random_instance(rng)
            res = feature_residuals(X, E, A, G1)
            assert np.all(res >= 0)

    def test_indefinite_kernel_negative_distance_raises(self):
        # tanh is not a positive-definite kernel; strongly negative "distances" surface
        spec = KernelSpec.sigmoid(gamma=1.0, c=-3.0)
        X = np.full((2, 1), 0.1)
        E = np.full((2, 1), 0.1)
        A = np.array([[0.5]])
        with pytest.raises(NumericError, match="sigmoid"):
            eval_j_feature(X, E, A, spec)


class TestAggregated:
    def test_boundaries(self):
        rng = np.random.default_rng(5)
        X, E, A = random_instance(rng)
        one = eval_aggregated(X, E, A, G1, 1.0)
        zero = eval_aggregated(X, E, A, G1, 0.0)
        assert one.j_aggregated == one.j_input == eval_j_input(X, E, A)
        assert zero.j_aggregated == zero.j_feature == eval_j_feature(X, E, A, G1)

    def test_half_on_seed_instance(self):
        ob = eval_aggregated(X2, E2, A2, G1, 0.5)
        j_feat = oracles.j_feature_gauss(X2, E2, A2, 1.0)
        assert ob.j_aggregated == pytest.approx(0.5 * (0.5 + j_feat), rel=1e-14)

    @pytest.mark.parametrize("alpha", [-0.1, 1.0000001, float("nan")])
    def test_alpha_domain(self, alpha):
        with pytest.raises(DomainError):
            eval_aggregated(X2, E2, A2, G1, alpha)

    def test_linearity_in_alpha(self):
        rng = np.random.default_rng(6)
        X, E, A = random_instance(rng)
        j1 = eval_aggregated(X, E, A, G1, 1.0).j_aggregated
        j0 = eval_aggregated(X, E, A, G1, 0.0).j_aggregated
        for alpha in np.linspace(0, 1, 11):
            ob = eval_aggregated(X, E, A, G1, alpha)
            assert ob.j_aggregated == pytest.approx(alpha * j1 + (1 - alpha) * j0, rel=1e-12)
            assert ob.j_aggregated == pytest.approx(
                ob.alpha * ob.j_input + (1 - ob.alpha) * ob.j_feature, rel=1e-12)


class TestGradA:
    def test_hand_value(self):
        x = np.array([[1.0], [0.0]])
        e = np.array([[1.0], [0.0]])
        assert grad_a(x, e, [[1.0]], G1, 1.0, 0, 0) == 0.0

    def test_stationary_coefficient(self):
        # e == x and a == 1: both the linear and the gaussian parts vanish
        x = np.array([[0.4], [0.9]])
        assert grad_a(x, x, [[1.0]], G1, 0.3, 0, 0) == 0.0

    def test_bounds(self):
        with pytest.raises(BoundsError):
            grad_a(X2, E2, A2, G1, 0.5, 1, 0)
        with pytest.raises(BoundsError):
            grad_a(X2, E2, A2, G1, 0.5, 0, 2)

    def test_matches_oracle_and_matrix_form(self):
        rng = np.random.default_rng(7)
        X, E, A = random_instance(rng)
        for alpha in (0.0, 0.3, 1.0):
            ref = oracles.grad_a_gauss(X, E, A, 1.0, alpha)
            full = gradient_a(X, E, A, G1, alpha)
            np.testing.assert_allclose(full, ref, rtol=1e-12, atol=1e-14)
            for n in range(2):
                for t in range(5):
                    assert grad_a(X, E, A, G1, alpha, n, t) == pytest.approx(ref[n, t], rel=1e-12, abs=1e-14)


class TestGradE:
    def test_zero_row_gives_zero_gradient(self):
        rng = np.random.default_rng(8)
        X, E, A = random_instance(rng)
        A[1] = 0.0
        for spec in (G1, KernelSpec.polynomial(3, 1.0)):
            assert np.array_equal(grad_e(X, E, A, spec, 0.4, 1), np.zeros(4))
            np.testing.assert_array_equal(gradient_e(X, E, A, spec, 0.4)[:, 1], 0.0)

    def test_bounds(self):
        with pytest.raises(BoundsError):
            grad_e(X2, E2, A2, G1, 0.5, 1)

    def test_gaussian_paths_agree_with_oracle(self):
        rng = np.random.default_rng(9)
        X, E, A = random_instance(rng)
        for alpha in (0.0, 0.3, 1.0):
            ref = oracles.grad_e_gauss(X, E, A, 1.0, alpha)
            np.testing.assert_allclose(gradient_e(X, E, A, G1, alpha), ref, rtol=1e-11)
            np.testing.assert_allclose(gradient_e_gaussian(X, E, A, G1, alpha), ref, rtol=1e-11)
            per_col = np.column_stack([grad_e(X, E, A, G1, alpha, n) for n in range(2)])
            np.testing.assert_allclose(per_col, ref, rtol=1e-11)

    def test_closed_form_rejects_other_kernels(self):
        with pytest.raises(DomainError):
            gradient_e_gaussian(X2, E2, A2, KernelSpec.polynomial(), 0.5)


KERNELS = [G1, KernelSpec.polynomial(d=3, c=1.0), KernelSpec.sigmoid(gamma=0.3, c=0.1),
           KernelSpec.exponential(1.0)]


@pytest.mark.parametrize("spec", KERNELS, ids=lambda s: s.family)
@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0])
def test_gradients_match_finite_differences(spec, alpha):
    rng = np.random.default_rng(10)
    for _ in range(3):
        X, E, A = random_instance(rng)
        fd_a = oracles.central_diff(lambda M: eval_aggregated(X, E, M, spec, alpha).j_aggregated, A)
        fd_e = oracles.central_diff(lambda M: eval_aggregated(X, M, A, spec, alpha).j_aggregated, E)
        np.testing.assert_allclose(gradient_a(X, E, A, spec, alpha), fd_a, rtol=1e-4, atol=1e-8)
        np.testing.assert_allclose(gradient_e(X, E, A, spec, alpha), fd_e, rtol=1e-4, atol=1e-8)
