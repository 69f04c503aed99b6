"""Gaussian/linear kernels and the closed-form ridge solve in dual form.

The solve handles ``min ||K_space_model - C||_F^2 + ridge * ||W||_F^2`` with
an unpenalized bias, expressed through its stationarity system: with
``B = K/(2*ridge) + I/2``,

    s      = 1^T B^{-1}
    bias^T = s C / (s 1)
    A      = B^{-1} (C - 1 bias^T)

and the modeling output is ``K A / (2*ridge) + 1 bias^T``. ``B`` is
symmetric positive definite for any PSD kernel matrix, so a Cholesky
factorization is always applicable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist, pdist, squareform


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and its parameters.

    ``sigma=None`` resolves the Gaussian bandwidth to the mean pairwise
    distance of the training samples (self-pairs excluded). ``ridge`` is
    the weight-norm penalty used by solves that take their penalty from
    the spec.
    """

    kind: str = "gaussian"
    sigma: float | None = None
    ridge: float = 0.05

    def __post_init__(self):
        if self.kind not in ("gaussian", "linear"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.ridge <= 0:
            raise ValueError("ridge must be positive")


@dataclass(frozen=True)
class KernelSolve:
    """Dual solve result: coefficients, bias, and the cached inputs."""

    dual_coeffs: np.ndarray  # (n, l)
    bias: np.ndarray  # (l,)
    s_row: np.ndarray  # (n,)
    gram: np.ndarray  # (n, n)
    ridge: float


def resolve_sigma(x: np.ndarray, spec: KernelSpec) -> float:
    """Bandwidth for the Gaussian kernel: fixed value or mean pairwise distance.

    The mean runs over distinct pairs only; including self-pairs would bias
    the bandwidth toward zero.
    """
    if spec.sigma is not None:
        return spec.sigma
    x = np.asarray(x, float)
    if x.shape[0] < 2:
        raise ValueError("cannot resolve sigma from fewer than two samples")
    sigma = float(pdist(x).mean())
    if sigma <= 0.0:
        raise ValueError("all samples identical: mean pairwise distance is zero")
    return sigma


def gram_matrix(x: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Train-by-train kernel matrix."""
    x = np.asarray(x, float)
    if not np.isfinite(x).all():
        raise ValueError("features contain NaN or Inf")
    if spec.kind == "linear":
        return x @ x.T
    sigma = resolve_sigma(x, spec)
    sq = squareform(pdist(x, "sqeuclidean"))
    return np.exp(-sq / (2.0 * sigma**2))


def cross_matrix(x_query: np.ndarray, x_train: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Query-by-train kernel evaluations, bandwidth taken from the train side."""
    x_query, x_train = np.asarray(x_query, float), np.asarray(x_train, float)
    if spec.kind == "linear":
        return x_query @ x_train.T
    sigma = resolve_sigma(x_train, spec)
    sq = cdist(x_query, x_train, "sqeuclidean")
    return np.exp(-sq / (2.0 * sigma**2))


def kkt_solve(k_gram: np.ndarray, target: np.ndarray, ridge: float) -> KernelSolve:
    """Closed-form dual ridge solve onto ``target``.

    Raises a descriptive error when the (theoretically SPD) system turns
    out numerically singular, which indicates a broken kernel matrix.
    """
    k_gram = np.asarray(k_gram, float)
    target = np.asarray(target, float)
    n = k_gram.shape[0]
    if k_gram.shape != (n, n):
        raise ValueError("kernel matrix must be square")
    if target.shape[0] != n:
        raise ValueError(
            f"target has {target.shape[0]} rows, kernel matrix is {n}x{n}"
        )
    if ridge <= 0:
        raise ValueError("ridge must be positive")

    b_sys = k_gram / (2.0 * ridge) + 0.5 * np.eye(n)
    try:
        factor = cho_factor(b_sys, lower=True)
    except LinAlgError as exc:
        cond = np.linalg.cond(b_sys)
        raise RuntimeError(
            f"singular ridge system (condition number {cond:.3e}); "
            "check the kernel matrix for NaN or non-PSD structure"
        ) from exc
    s_row = cho_solve(factor, np.ones(n))
    bias = (s_row @ target) / s_row.sum()
    dual = cho_solve(factor, target - np.outer(np.ones(n), bias))
    return KernelSolve(
        dual_coeffs=dual, bias=bias, s_row=s_row, gram=k_gram, ridge=ridge
    )


def predict(model: KernelSolve, k_cross: np.ndarray) -> np.ndarray:
    """Modeling output ``k_cross A / (2*ridge) + bias`` for query rows."""
    k_cross = np.atleast_2d(np.asarray(k_cross, float))
    if k_cross.shape[1] != model.dual_coeffs.shape[0]:
        raise ValueError(
            f"k_cross has {k_cross.shape[1]} columns, expected "
            f"{model.dual_coeffs.shape[0]} (one per training sample)"
        )
    return k_cross @ model.dual_coeffs / (2.0 * model.ridge) + model.bias


def training_output(model: KernelSolve) -> np.ndarray:
    """Modeling output on the training rows themselves."""
    return predict(model, model.gram)
