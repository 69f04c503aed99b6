"""Row-wise solver for the partner's auxiliary-confidence subproblem.

Each row solves

    min  c^T c + g^T c   s.t.  lower <= c <= upper,  sum(c) = sum_target

which is a strictly convex separable QP. Its stationarity system is a
box-clipped affine map of one scalar multiplier ``nu``:

    c_j(nu) = clip((-g_j - nu) / 2, lower_j, upper_j)

The coordinate sum of ``c(nu)`` is non-increasing in ``nu``, so the
equality constraint reduces to a monotone scalar root found by bisection.
No external QP dependency is needed for this geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NU_TOL = 1e-12
MAX_BISECT = 200


@dataclass(frozen=True)
class RowQpProblem:
    """One row's linear term, box bounds, and equality target."""

    linear: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    sum_target: float

    def __post_init__(self):
        g = np.asarray(self.linear, float)
        lo = np.asarray(self.lower, float)
        hi = np.asarray(self.upper, float)
        object.__setattr__(self, "linear", g)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if not g.shape == lo.shape == hi.shape:
            raise ValueError("linear, lower, upper must share one shape")
        if (lo > hi).any():
            raise ValueError("lower bound exceeds upper bound")
        if not lo.sum() - 1e-12 <= self.sum_target <= hi.sum() + 1e-12:
            raise ValueError(
                f"infeasible: sum target {self.sum_target} outside "
                f"[{lo.sum()}, {hi.sum()}]"
            )


def _clip_map(nu, g, lo, hi):
    return np.clip((-g - nu) / 2.0, lo, hi)


def solve_row_with_multiplier(problem: RowQpProblem) -> tuple[np.ndarray, float]:
    """Minimizer of one row problem together with its equality multiplier."""
    g, lo, hi = problem.linear, problem.lower, problem.upper
    nu_lo = float((-g - 2.0 * hi).min())
    nu_hi = float((-g - 2.0 * lo).max())
    # bracketing: sum is maximal (= sum of uppers) at nu_lo, minimal at nu_hi
    assert _clip_map(nu_lo, g, lo, hi).sum() >= problem.sum_target - 1e-9
    assert _clip_map(nu_hi, g, lo, hi).sum() <= problem.sum_target + 1e-9
    for _ in range(MAX_BISECT):
        if nu_hi - nu_lo <= NU_TOL:
            break
        mid = 0.5 * (nu_lo + nu_hi)
        if _clip_map(mid, g, lo, hi).sum() >= problem.sum_target:
            nu_lo = mid
        else:
            nu_hi = mid
    nu = 0.5 * (nu_lo + nu_hi)
    return _clip_map(nu, g, lo, hi), nu


def solve_row(problem: RowQpProblem) -> np.ndarray:
    """Unique minimizer of one row problem."""
    c, _ = solve_row_with_multiplier(problem)
    return c


def kkt_residual(problem: RowQpProblem, c: np.ndarray, nu: float) -> float:
    """Worst violation of stationarity, sign conditions, and the constraints.

    Interior coordinates require ``2c + g + nu = 0``; lower-active ones
    require ``2c + g + nu >= 0`` and upper-active ones ``<= 0``.
    """
    g, lo, hi = problem.linear, problem.lower, problem.upper
    grad = 2.0 * c + g + nu
    # coordinates pinned by lower == upper carry no sign condition
    pinned = hi - lo <= 1e-12
    at_lower = (c <= lo + 1e-9) & ~pinned
    at_upper = (c >= hi - 1e-9) & ~pinned
    interior = ~(at_lower | at_upper | pinned)
    residual = 0.0
    if interior.any():
        residual = max(residual, float(np.abs(grad[interior]).max()))
    if at_lower.any():
        residual = max(residual, float(np.maximum(-grad[at_lower], 0.0).max()))
    if at_upper.any():
        residual = max(residual, float(np.maximum(grad[at_upper], 0.0).max()))
    residual = max(residual, abs(float(c.sum()) - problem.sum_target))
    residual = max(residual, float(np.maximum(lo - c, 0.0).max()))
    residual = max(residual, float(np.maximum(c - hi, 0.0).max()))
    return residual


def solve_matrix(
    j: np.ndarray, o: np.ndarray, yhat: np.ndarray, gamma: float
) -> np.ndarray:
    """Solve every row problem of the auxiliary-confidence update at once.

    Row ``i`` minimizes ``c^T c + (gamma * o_i - 2 * j_i)^T c`` over the box
    ``[yhat_i, 1]`` with coordinate sum ``l - 1``. The bisection runs
    vectorized across rows, each with its own multiplier.
    """
    j, o, yhat = np.asarray(j, float), np.asarray(o, float), np.asarray(yhat, float)
    if not j.shape == o.shape == yhat.shape:
        raise ValueError("j, o, yhat must share one shape")
    n, l = j.shape
    g = gamma * o - 2.0 * j
    lo = yhat
    hi = np.ones_like(g)
    target = float(l - 1)
    if (lo.sum(axis=1) > target + 1e-12).any():
        raise ValueError("infeasible row: non-candidate mass exceeds l - 1")

    nu_lo = (-g - 2.0 * hi).min(axis=1)
    nu_hi = (-g - 2.0 * lo).max(axis=1)
    for _ in range(MAX_BISECT):
        if (nu_hi - nu_lo).max() <= NU_TOL:
            break
        mid = 0.5 * (nu_lo + nu_hi)
        sums = np.clip((-g - mid[:, None]) / 2.0, lo, hi).sum(axis=1)
        too_low = sums >= target
        nu_lo = np.where(too_low, mid, nu_lo)
        nu_hi = np.where(too_low, nu_hi, mid)
    nu = 0.5 * (nu_lo + nu_hi)
    return np.clip((-g - nu[:, None]) / 2.0, lo, hi)
