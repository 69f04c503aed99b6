"""The complementary partner classifier.

The partner regresses onto an auxiliary complement-confidence matrix C
while a trace coupling ``gamma * sum(O * C)`` nudges C away from labels the
candidate-side supervision O favors. Fitting alternates two exact steps:
the row-wise QP for C (given the current modeling output) and the dual
ridge solve for the regression (given C), so the joint objective descends
monotonically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernel, qp
from .core import PartialLabelDataset


@dataclass(frozen=True)
class PartnerConfig:
    ridge: float = 0.05
    gamma: float = 2.0
    inner_iters: int = 10
    inner_tol: float = 1e-6
    kernel: kernel.KernelSpec = field(default_factory=kernel.KernelSpec)
    # ablation: replace the trace coupling with ||O + C - 1||_F^2, which
    # forces C toward 1 - O instead of merely discouraging overlap
    aggressive: bool = False

    def __post_init__(self):
        if self.ridge <= 0:
            raise ValueError("ridge must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if self.inner_iters < 1:
            raise ValueError("inner_iters must be at least 1")


@dataclass(frozen=True)
class PartnerModel:
    solve: kernel.KernelSolve
    c: np.ndarray
    objective_trace: np.ndarray


def _coupling(o: np.ndarray, c: np.ndarray, config: PartnerConfig) -> float:
    if config.aggressive:
        return config.gamma * float(((o + c - 1.0) ** 2).sum())
    return config.gamma * float((o * c).sum())


def _objective(
    j: np.ndarray, c: np.ndarray, o: np.ndarray,
    solve: kernel.KernelSolve, config: PartnerConfig,
) -> float:
    fit_term = float(((j - c) ** 2).sum())
    # ridge * ||W||^2 in dual form: trace(A^T K A) / (4 * ridge)
    a = solve.dual_coeffs
    norm_term = float(np.einsum("ij,ik,kj->", a, solve.gram, a)) / (4.0 * config.ridge)
    return fit_term + _coupling(o, c, config) + norm_term


def _solve_c(
    j: np.ndarray, o: np.ndarray, yhat: np.ndarray, config: PartnerConfig
) -> np.ndarray:
    if not config.aggressive:
        return qp.solve_matrix(j, o, yhat, config.gamma)
    # ||j - c||^2 + gamma ||o + c - 1||^2 rescales to the same row geometry
    # with a shifted target and no trace term
    g = config.gamma
    return qp.solve_matrix((j + g * (1.0 - o)) / (1.0 + g), o, yhat, gamma=0.0)


def fit_partner(
    dataset: PartialLabelDataset,
    o_supervision: np.ndarray,
    config: PartnerConfig,
    gram: np.ndarray | None = None,
) -> PartnerModel:
    """Fit the partner on candidate-side supervision ``o_supervision``.

    ``gram`` may carry a precomputed train kernel matrix; it is never
    mutated and can be shared across repeated fits on the same dataset.
    """
    o = np.asarray(o_supervision, float)
    if o.shape != dataset.candidates.shape:
        raise ValueError("supervision shape must match the candidate matrix")
    yhat = dataset.noncandidates
    if gram is None:
        gram = kernel.gram_matrix(dataset.features, config.kernel)

    j = np.zeros_like(o)
    trace: list[float] = []
    solve = None
    c = None
    for _ in range(config.inner_iters):
        c = _solve_c(j, o, yhat, config)
        solve = kernel.kkt_solve(gram, c, config.ridge)
        j = kernel.training_output(solve)
        trace.append(_objective(j, c, o, solve, config))
        if len(trace) >= 2:
            prev, curr = trace[-2], trace[-1]
            if abs(prev - curr) <= config.inner_tol * max(1.0, abs(prev)):
                break

    assert c is not None and solve is not None
    assert (c >= yhat - 1e-9).all() and (c <= 1.0 + 1e-9).all()
    assert np.abs(c.sum(axis=1) - (dataset.label_count - 1)).max() <= 1e-9
    return PartnerModel(solve=solve, c=c, objective_trace=np.asarray(trace))


def partner_modeling_output(model: PartnerModel, k_cross: np.ndarray) -> np.ndarray:
    """Complement-confidence estimates for the query rows of ``k_cross``."""
    return kernel.predict(model.solve, k_cross)


def predict_labels(model: PartnerModel, k_cross: np.ndarray) -> np.ndarray:
    """Predicted labels: the label whose complement confidence is smallest.

    Ties resolve to the lowest label index.
    """
    phat = np.clip(partner_modeling_output(model, k_cross), 0.0, 1.0)
    return np.argmin(phat, axis=1)
