import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plcp.qp import (
    RowQpProblem,
    kkt_residual,
    solve_matrix,
    solve_row,
    solve_row_with_multiplier,
)

TOL = 1e-8


def enumeration_oracle(g, lo, hi, target):
    """Exhaustive reference solver: try every lower/interior/upper pattern.

    For each pattern the interior multiplier follows from the sum
    constraint; a pattern is admitted if its coordinates respect the box
    and the sign conditions. The best admitted candidate by objective
    value is returned.
    """
    l = len(g)
    best, best_obj = None, np.inf
    for pattern in itertools.product((0, 1, 2), repeat=l):
        pattern = np.array(pattern)
        c = np.where(pattern == 0, lo, np.where(pattern == 2, hi, 0.0))
        interior = pattern == 1
        fixed_sum = c[~interior].sum()
        if interior.any():
            m = interior.sum()
            nu = (-(g[interior].sum()) - 2.0 * (target - fixed_sum)) / m
            c_int = (-g[interior] - nu) / 2.0
            if (c_int < lo[interior] - 1e-9).any() or (c_int > hi[interior] + 1e-9).any():
                continue
            c = c.astype(float)
            c[interior] = c_int
        else:
            if abs(fixed_sum - target) > 1e-9:
                continue
            nu_min = (-g - 2.0 * lo)[pattern == 0].max() if (pattern == 0).any() else -np.inf
            nu_max = (-g - 2.0 * hi)[pattern == 2].min() if (pattern == 2).any() else np.inf
            if nu_min > nu_max + 1e-9:
                continue
            nu = np.clip(0.0, nu_min, nu_max)
        grad = 2.0 * c + g + nu
        if (grad[pattern == 0] < -1e-7).any() or (grad[pattern == 2] > 1e-7).any():
            continue
        obj = float(c @ c + g @ c)
        if obj < best_obj - 1e-12 or best is None:
            best, best_obj = c, obj
    assert best is not None, "oracle found no KKT point"
    return best


def random_problem(rng, l):
    lo = np.zeros(l)
    lo[rng.random(l) < 0.4] = 1.0
    if (lo == 1.0).all():
        lo[rng.integers(l)] = 0.0
    g = rng.normal(scale=2.0, size=l)
    return RowQpProblem(linear=g, lower=lo, upper=np.ones(l), sum_target=float(l - 1))


class TestSolveRow:
    def test_fully_constrained_two_labels(self):
        problem = RowQpProblem(
            linear=np.array([5.0, -3.0]),
            lower=np.array([0.0, 1.0]),
            upper=np.array([1.0, 1.0]),
            sum_target=1.0,
        )
        np.testing.assert_allclose(solve_row(problem), [0.0, 1.0], atol=1e-9)

    def test_interior_hand_solution(self):
        # g = gamma * o with gamma=2, o=[0.5,0.3,0.2]; the stationarity
        # system gives nu=-2 with every coordinate interior
        problem = RowQpProblem(
            linear=2.0 * np.array([0.5, 0.3, 0.2]),
            lower=np.zeros(3),
            upper=np.ones(3),
            sum_target=2.0,
        )
        c, nu = solve_row_with_multiplier(problem)
        np.testing.assert_allclose(c, [0.5, 0.7, 0.8], atol=1e-8)
        assert nu == pytest.approx(-2.0, abs=1e-8)

    def test_zero_linear_term_uniform(self):
        problem = RowQpProblem(
            linear=np.zeros(3), lower=np.zeros(3), upper=np.ones(3), sum_target=2.0
        )
        np.testing.assert_allclose(solve_row(problem), [2 / 3] * 3, atol=1e-9)

    def test_infeasible_rejected(self):
        with pytest.raises(ValueError, match="infeasible"):
            RowQpProblem(
                linear=np.zeros(2),
                lower=np.zeros(2),
                upper=np.ones(2),
                sum_target=3.0,
            )

    @pytest.mark.parametrize("l", [2, 3, 4, 5, 6])
    def test_matches_enumeration_oracle(self, l):
        rng = np.random.default_rng(l)
        for _ in range(40):
            problem = random_problem(rng, l)
            c, nu = solve_row_with_multiplier(problem)
            expected = enumeration_oracle(
                problem.linear, problem.lower, problem.upper, problem.sum_target
            )
            np.testing.assert_allclose(c, expected, atol=TOL)
            assert kkt_residual(problem, c, nu) < TOL


class TestSolveMatrix:
    def test_single_row_reduces_to_solve_row(self):
        rng = np.random.default_rng(5)
        j = rng.normal(size=(1, 4))
        o = rng.random((1, 4))
        yhat = np.zeros((1, 4))
        out = solve_matrix(j, o, yhat, gamma=2.0)
        problem = RowQpProblem(
            linear=2.0 * o[0] - 2.0 * j[0],
            lower=yhat[0],
            upper=np.ones(4),
            sum_target=3.0,
        )
        np.testing.assert_allclose(out[0], solve_row(problem), atol=1e-10)

    def test_random_matrix_against_oracle(self):
        rng = np.random.default_rng(9)
        n, l = 5, 4
        j = rng.normal(size=(n, l))
        o = rng.random((n, l))
        yhat = (rng.random((n, l)) < 0.3).astype(float)
        yhat[np.arange(n), rng.integers(l, size=n)] = 0.0
        out = solve_matrix(j, o, yhat, gamma=2.0)
        for i in range(n):
            g = 2.0 * o[i] - 2.0 * j[i]
            expected = enumeration_oracle(g, yhat[i], np.ones(l), float(l - 1))
            np.testing.assert_allclose(out[i], expected, atol=TOL)

    def test_constraints_hold_exactly(self):
        rng = np.random.default_rng(21)
        j = rng.normal(size=(50, 5))
        o = rng.random((50, 5))
        yhat = np.zeros((50, 5))
        out = solve_matrix(j, o, yhat, gamma=2.0)
        np.testing.assert_allclose(out.sum(axis=1), 4.0, atol=1e-9)
        assert (out >= -1e-12).all() and (out <= 1.0 + 1e-12).all()

    def test_zero_gamma_feasible_point_is_fixed(self):
        # projection of an already-feasible interior point returns the point
        j = np.array([[0.4, 0.8, 0.8], [0.2, 0.9, 0.9]])
        out = solve_matrix(j, np.zeros_like(j), np.zeros_like(j), gamma=0.0)
        np.testing.assert_allclose(out, j, atol=1e-9)

    def test_zero_hot_limit(self):
        rng = np.random.default_rng(33)
        o = rng.random((20, 5))
        o += np.arange(5) * 1e-3  # keep row maxima unique
        out = solve_matrix(np.zeros_like(o), o, np.zeros_like(o), gamma=1e6)
        for i in range(20):
            expected = np.ones(5)
            expected[np.argmax(o[i])] = 0.0
            np.testing.assert_allclose(out[i], expected, atol=1e-3)


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_solver_kkt_property(l, seed):
    problem = random_problem(np.random.default_rng(seed), l)
    c, nu = solve_row_with_multiplier(problem)
    assert kkt_residual(problem, c, nu) < TOL


def test_clip_sum_monotone_in_nu():
    rng = np.random.default_rng(2)
    problem = random_problem(rng, 5)
    nus = np.linspace(-10, 10, 401)
    sums = [
        np.clip((-problem.linear - nu) / 2.0, problem.lower, problem.upper).sum()
        for nu in nus
    ]
    assert all(a >= b - 1e-12 for a, b in zip(sums, sums[1:]))
