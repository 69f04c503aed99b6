import numpy as np
import pytest

from plcp.kernel import (
    KernelSpec,
    cross_matrix,
    gram_matrix,
    kkt_solve,
    predict,
    resolve_sigma,
    training_output,
)


def primal_ridge_oracle(x, c, ridge):
    """Direct least-squares solve of the bias-unpenalized ridge problem.

    Stacks a constant column and penalizes only the weight block, then
    returns the fitted outputs. Independent of the dual-path code.
    """
    n, d = x.shape
    design = np.hstack([x, np.ones((n, 1))])
    penalty = np.diag(np.concatenate([np.full(d, ridge), [0.0]]))
    theta = np.linalg.solve(design.T @ design + penalty, design.T @ c)
    return design @ theta


class TestGramMatrix:
    def test_identical_points_gaussian(self):
        x = np.array([[1.0, 2.0], [1.0, 2.0], [3.0, 4.0]])
        k = gram_matrix(x, KernelSpec(kind="gaussian", sigma=1.0))
        np.testing.assert_allclose(k[0, 1], 1.0)
        np.testing.assert_allclose(np.diag(k), 1.0)

    def test_linear_is_xxt(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(5, 3))
        np.testing.assert_allclose(gram_matrix(x, KernelSpec(kind="linear")), x @ x.T)

    def test_gaussian_matches_brute_force(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(3, 4))
        spec = KernelSpec(kind="gaussian")
        sigma = resolve_sigma(x, spec)
        k = gram_matrix(x, spec)
        for i in range(3):
            for j in range(3):
                expected = np.exp(-np.sum((x[i] - x[j]) ** 2) / (2 * sigma**2))
                assert abs(k[i, j] - expected) < 1e-12

    def test_symmetry(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(20, 6))
        k = gram_matrix(x, KernelSpec())
        assert np.abs(k - k.T).max() < 1e-12

    def test_sigma_excludes_self_pairs(self):
        x = np.array([[0.0], [2.0]])
        # one distinct pair at distance 2; self-pairs would drag the mean down
        assert resolve_sigma(x, KernelSpec()) == pytest.approx(2.0)

    def test_all_identical_points_rejected(self):
        x = np.zeros((3, 2))
        with pytest.raises(ValueError, match="identical"):
            gram_matrix(x, KernelSpec(kind="gaussian"))


class TestKktSolve:
    def test_zero_target_gives_zero_model(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(6, 2))
        k = gram_matrix(x, KernelSpec())
        solve = kkt_solve(k, np.zeros((6, 3)), ridge=0.05)
        np.testing.assert_allclose(solve.dual_coeffs, 0.0, atol=1e-12)
        np.testing.assert_allclose(solve.bias, 0.0, atol=1e-12)
        np.testing.assert_allclose(training_output(solve), 0.0, atol=1e-12)

    def test_single_sample_output_equals_target(self):
        # closed form at n=1: s = 1/(1/(2*ridge) + 1/2), bias = target,
        # dual coefficient 0, output = target for every ridge value
        for ridge in (0.05, 1e-6, 3.0):
            solve = kkt_solve(np.array([[1.0]]), np.array([[0.7, 0.2]]), ridge)
            np.testing.assert_allclose(solve.bias, [0.7, 0.2], atol=1e-12)
            np.testing.assert_allclose(solve.dual_coeffs, 0.0, atol=1e-12)
            np.testing.assert_allclose(
                training_output(solve), [[0.7, 0.2]], atol=1e-12
            )

    @pytest.mark.parametrize("seed", range(5))
    def test_primal_dual_equivalence_linear_kernel(self, seed):
        rng = np.random.default_rng(seed)
        n, d, l = rng.integers(5, 50), rng.integers(2, 10), rng.integers(2, 5)
        x = rng.normal(size=(n, d))
        c = rng.normal(size=(n, l))
        ridge = 0.05
        solve = kkt_solve(gram_matrix(x, KernelSpec(kind="linear")), c, ridge)
        np.testing.assert_allclose(
            training_output(solve), primal_ridge_oracle(x, c, ridge), atol=1e-6
        )

    def test_kkt_residuals(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(15, 3))
        c = rng.normal(size=(15, 4))
        solve = kkt_solve(gram_matrix(x, KernelSpec()), c, ridge=0.05)
        h = training_output(solve)
        # stationarity in the slack block: 2(h - c) + a = 0
        assert np.abs(2.0 * (h - c) + solve.dual_coeffs).max() < 1e-6
        # stationarity in the bias: columns of a sum to zero
        assert np.abs(solve.dual_coeffs.sum(axis=0)).max() < 1e-6

    def test_shape_errors(self):
        with pytest.raises(ValueError, match="square"):
            kkt_solve(np.zeros((2, 3)), np.zeros((2, 2)), 0.05)
        with pytest.raises(ValueError, match="rows"):
            kkt_solve(np.eye(3), np.zeros((2, 2)), 0.05)

    def test_singular_system_diagnostic(self):
        bad = np.full((3, 3), np.nan)
        with pytest.raises((RuntimeError, ValueError)):
            kkt_solve(bad, np.zeros((3, 2)), 0.05)


class TestPredict:
    def test_training_rows_consistent(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=(10, 2))
        k = gram_matrix(x, KernelSpec())
        solve = kkt_solve(k, rng.normal(size=(10, 3)), 0.05)
        np.testing.assert_allclose(predict(solve, k[:4]), training_output(solve)[:4])

    def test_zero_dual_coeffs_gives_bias(self):
        solve = kkt_solve(np.array([[1.0]]), np.array([[0.3, 0.9]]), 0.05)
        out = predict(solve, np.array([[0.5]]))
        np.testing.assert_allclose(out, [[0.3, 0.9]], atol=1e-12)

    def test_linear_kernel_matches_primal_prediction(self):
        rng = np.random.default_rng(13)
        x = rng.normal(size=(12, 3))
        c = rng.normal(size=(12, 2))
        x_test = rng.normal(size=(4, 3))
        ridge = 0.05
        spec = KernelSpec(kind="linear")
        solve = kkt_solve(gram_matrix(x, spec), c, ridge)
        got = predict(solve, cross_matrix(x_test, x, spec))
        # primal oracle extended to new points
        n, d = x.shape
        design = np.hstack([x, np.ones((n, 1))])
        penalty = np.diag(np.concatenate([np.full(d, ridge), [0.0]]))
        theta = np.linalg.solve(design.T @ design + penalty, design.T @ c)
        expected = np.hstack([x_test, np.ones((4, 1))]) @ theta
        np.testing.assert_allclose(got, expected, atol=1e-6)

    def test_column_mismatch(self):
        solve = kkt_solve(np.eye(3), np.zeros((3, 2)), 0.05)
        with pytest.raises(ValueError, match="columns"):
            predict(solve, np.zeros((2, 4)))
