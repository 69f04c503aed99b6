"""Core types for partial-label data and the confidence update operators.

A partial-label dataset pairs each sample with a candidate label set that
contains the (hidden) ground truth. Two confidence matrices track the
state of disambiguation: ``p`` scores candidates as ground truth, ``phat``
scores labels as *not* ground truth. Both are exchanged between classifiers
only in blurred, row-normalized form (``o``, ``ohat``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import blur


@dataclass(frozen=True)
class PartialLabelDataset:
    """Feature matrix plus candidate-label mask, with optional ground truth.

    Attributes
    ----------
    features : (n, d) float array
    candidates : (n, l) 0/1 array, each row marking the candidate set.
        Every row must contain at least one candidate.
    ground_truth : optional (n,) int array with values in [0, l); when
        present, the truth must sit inside each sample's candidate set.
    """

    features: np.ndarray
    candidates: np.ndarray
    ground_truth: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        y = np.asarray(self.candidates)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "candidates", y.astype(float))
        if x.ndim != 2 or y.ndim != 2:
            raise ValueError("features and candidates must be 2-D matrices")
        if x.shape[0] != y.shape[0]:
            raise ValueError(
                f"features has {x.shape[0]} rows but candidates has {y.shape[0]}"
            )
        if not np.isfinite(x).all():
            raise ValueError("features contain NaN or Inf")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("candidates must be a 0/1 matrix")
        empty = np.flatnonzero(y.sum(axis=1) == 0)
        if empty.size:
            raise ValueError(f"empty candidate set at row {empty[0]}")
        if self.ground_truth is not None:
            t = np.asarray(self.ground_truth, dtype=int)
            object.__setattr__(self, "ground_truth", t)
            if t.shape != (x.shape[0],):
                raise ValueError("ground_truth length must match sample count")
            if t.min() < 0 or t.max() >= y.shape[1]:
                raise ValueError("ground_truth labels out of range")
            outside = np.flatnonzero(self.candidates[np.arange(t.size), t] == 0)
            if outside.size:
                raise ValueError(
                    f"ground truth outside candidate set at row {outside[0]}"
                )

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def label_count(self) -> int:
        return self.candidates.shape[1]

    @property
    def noncandidates(self) -> np.ndarray:
        """Complement mask: 1 exactly where a label is known to be wrong."""
        return 1.0 - self.candidates


@dataclass(frozen=True)
class ConfidenceState:
    """Paired confidence matrices and their blurred supervision forms.

    ``p`` lives in [0, Y] element-wise, ``phat`` in [1-Y, 1]. ``o`` and
    ``ohat`` are the row-stochastic supervision signals exchanged between
    the two classifiers; they vanish off-candidates.
    """

    p: np.ndarray
    phat: np.ndarray
    o: np.ndarray
    ohat: np.ndarray


def init_confidence(dataset: PartialLabelDataset, k: float = -1.0) -> ConfidenceState:
    """Initial confidence state: uniform over candidates, complement on phat.

    ``p`` starts at 1/|candidate set| on candidates and 0 elsewhere; ``phat``
    starts at the non-candidate mask. The first base supervision ``ohat`` is
    the initial ``p`` itself (which is already uniform on candidates, hence
    a fixed point of the blur transform).
    """
    y = dataset.candidates
    p = y / y.sum(axis=1, keepdims=True)
    phat = dataset.noncandidates
    o = blur.blur_labeling(p, y, k)
    ohat = p.copy()
    return ConfidenceState(p=p, phat=phat, o=o, ohat=ohat)


def _check_shapes(*mats: np.ndarray) -> None:
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"shape mismatch: {sorted(shapes)}")


def update_labeling_confidence(
    p_prev: np.ndarray, m: np.ndarray, y: np.ndarray, alpha: float
) -> np.ndarray:
    """Blend previous confidence with a modeling output, clamp to [0, y].

    Returns ``clip(alpha * p_prev + (1 - alpha) * m, 0, y)`` element-wise.
    Rows are deliberately not renormalized here; normalization happens in
    the blur step.
    """
    p_prev, m, y = np.asarray(p_prev, float), np.asarray(m, float), np.asarray(y, float)
    _check_shapes(p_prev, m, y)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    blended = alpha * p_prev + (1.0 - alpha) * m
    return np.clip(blended, 0.0, y)


def update_noncandidate_confidence(
    phat_prev: np.ndarray, mhat: np.ndarray, yhat: np.ndarray, alpha: float
) -> np.ndarray:
    """Blend complement confidence with a modeling output, clamp to [yhat, 1].

    Mirror of :func:`update_labeling_confidence`: non-candidates stay pinned
    at 1, candidates move inside [0, 1].
    """
    phat_prev = np.asarray(phat_prev, float)
    mhat, yhat = np.asarray(mhat, float), np.asarray(yhat, float)
    _check_shapes(phat_prev, mhat, yhat)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    blended = alpha * phat_prev + (1.0 - alpha) * mhat
    return np.clip(blended, yhat, 1.0)
