"""The mutual-supervision loop coupling a base classifier with the partner.

Each iteration runs: base training on the partner-side supervision, the
candidate-confidence blend/clamp, blurring, partner training on that
blurred supervision, the complement-confidence blend/clamp, and blurring
back. The loop stops early once the per-sample label assignment settles
for two consecutive iterations, and always within ``max_iter`` rounds.
Test predictions come from the partner of the final iteration.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from . import base as base_mod
from . import blur, kernel, partner
from .core import (
    ConfidenceState,
    PartialLabelDataset,
    init_confidence,
    update_labeling_confidence,
    update_noncandidate_confidence,
)
from .metrics import MetricReport


class InvariantViolation(AssertionError):
    """A per-iteration consistency check on the confidence state failed."""


@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 0.5
    k: float = -1.0
    max_iter: int = 5
    stop_change_frac: float = 0.05
    base: base_mod.BaseClassifierKind = field(default_factory=base_mod.BaseClassifierKind)
    partner: partner.PartnerConfig = field(default_factory=partner.PartnerConfig)
    seed: int = 0
    # diagnostics: predict test labels from the base's final output instead
    # of the partner
    predict_from_base: bool = False
    check_invariants: bool = True

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0.0 <= self.stop_change_frac <= 1.0:
            raise ValueError("stop_change_frac must be in [0, 1]")
        blur.validate_temperature(self.k)


@dataclass(frozen=True)
class IterationSnapshot:
    """Per-iteration trail: argmax labels plus confidence extrema for plots."""

    labels: np.ndarray
    change_frac: float
    truth_confidence: np.ndarray | None
    max_false_confidence: np.ndarray | None


@dataclass(frozen=True)
class RunReport:
    iterations_run: int
    trajectories: list[IterationSnapshot]
    final_partner: partner.PartnerModel
    final_state: ConfidenceState
    train_predictions: np.ndarray
    test_predictions: np.ndarray
    metrics: MetricReport | None = None


def should_stop(
    prev_labels: np.ndarray,
    curr_labels: np.ndarray,
    history: deque,
    threshold: float,
) -> bool:
    """Record the label-change fraction and test the two-in-a-row rule.

    ``history`` is a ring of the last two change fractions, mutated in
    place. Returns True once two consecutive fractions fall below the
    threshold. The hard iteration cap is the caller's responsibility.
    """
    prev_labels, curr_labels = np.asarray(prev_labels), np.asarray(curr_labels)
    if prev_labels.shape != curr_labels.shape:
        raise ValueError("label vectors must have equal length")
    history.append(float(np.mean(prev_labels != curr_labels)))
    return len(history) == 2 and all(f < threshold for f in history)


def _check_state(state: ConfidenceState, y: np.ndarray) -> None:
    yhat = 1.0 - y
    off = y == 0
    for name, o in (("o", state.o), ("ohat", state.ohat)):
        if np.abs(o.sum(axis=1) - 1.0).max() > 1e-9:
            raise InvariantViolation(f"{name} rows must sum to 1")
        if off.any() and np.abs(o[off]).max() > 0.0:
            raise InvariantViolation(f"{name} must vanish off-candidates")
    if (state.p < -1e-12).any() or (state.p > y + 1e-12).any():
        raise InvariantViolation("p left the [0, y] box")
    if (state.phat < yhat - 1e-12).any() or (state.phat > 1.0 + 1e-12).any():
        raise InvariantViolation("phat left the [yhat, 1] box")


def _masked_argmax(scores: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.argmax(np.where(y > 0, scores, -np.inf), axis=1)


def _snapshot(
    p: np.ndarray, labels: np.ndarray, change_frac: float,
    dataset: PartialLabelDataset,
) -> IterationSnapshot:
    truth = dataset.ground_truth
    if truth is None:
        return IterationSnapshot(labels, change_frac, None, None)
    idx = np.arange(p.shape[0])
    truth_conf = p[idx, truth]
    rivals = np.where(dataset.candidates > 0, p, -np.inf)
    rivals[idx, truth] = -np.inf
    max_false = rivals.max(axis=1)
    max_false = np.where(np.isfinite(max_false), max_false, 0.0)
    return IterationSnapshot(labels, change_frac, truth_conf, max_false)


def _pin_sigma(spec: kernel.KernelSpec, x: np.ndarray) -> kernel.KernelSpec:
    if spec.kind == "gaussian" and spec.sigma is None:
        return replace(spec, sigma=kernel.resolve_sigma(x, spec))
    return spec


def _as_test_matrix(dataset: PartialLabelDataset, test_features) -> np.ndarray:
    test = np.asarray(test_features, float)
    if test.size == 0:
        return test.reshape(0, dataset.n_features)
    test = np.atleast_2d(test)
    if test.shape[1] != dataset.n_features:
        raise ValueError(
            f"test features have {test.shape[1]} columns, expected {dataset.n_features}"
        )
    return test


def run_plcp(
    dataset: PartialLabelDataset,
    test_features: np.ndarray,
    config: EngineConfig,
) -> RunReport:
    """Run the full mutual-supervision loop and predict the test labels."""
    x = dataset.features
    y = dataset.candidates
    yhat = dataset.noncandidates
    test_features = _as_test_matrix(dataset, test_features)

    partner_spec = _pin_sigma(config.partner.kernel, x)
    partner_cfg = replace(config.partner, kernel=partner_spec)
    gram = kernel.gram_matrix(x, partner_spec)

    base_kind = config.base
    base_gram = None
    if base_kind.kind == "kernel-ls":
        base_spec = _pin_sigma(base_kind.kernel, x)
        base_kind = replace(base_kind, kernel=base_spec)
        base_gram = gram if base_spec == partner_spec else kernel.gram_matrix(x, base_spec)

    state = init_confidence(dataset, config.k)
    labels_prev = _masked_argmax(state.p, y)
    history: deque = deque(maxlen=2)
    snapshots: list[IterationSnapshot] = []
    partner_model = None

    for _ in range(config.max_iter):
        supervision = state.ohat
        if base_kind.binarize:
            supervision = base_mod.binarize_supervision(state.ohat, state.p, y)
        m = base_mod.fit_predict_base(base_kind, dataset, supervision, gram=base_gram)
        p_new = update_labeling_confidence(state.p, m, y, config.alpha)
        o_new = blur.blur_labeling(p_new, y, config.k)

        partner_model = partner.fit_partner(dataset, o_new, partner_cfg, gram=gram)
        mhat = kernel.training_output(partner_model.solve)
        phat_new = update_noncandidate_confidence(state.phat, mhat, yhat, config.alpha)
        ohat_new = blur.blur_noncandidate(phat_new, y, config.k)

        state = ConfidenceState(p=p_new, phat=phat_new, o=o_new, ohat=ohat_new)
        if config.check_invariants:
            _check_state(state, y)

        labels_curr = _masked_argmax(p_new, y)
        stop = should_stop(labels_prev, labels_curr, history, config.stop_change_frac)
        snapshots.append(_snapshot(p_new, labels_curr, history[-1], dataset))
        labels_prev = labels_curr
        if stop:
            break

    assert partner_model is not None
    train_predictions = _masked_argmax(state.p, y)
    if test_features.shape[0] == 0:
        test_predictions = np.zeros(0, dtype=int)
    elif config.predict_from_base:
        supervision = state.ohat
        if base_kind.binarize:
            supervision = base_mod.binarize_supervision(state.ohat, state.p, y)
        m_test = base_mod.query_outputs(
            base_kind, dataset, supervision, test_features, gram=base_gram
        )
        test_predictions = np.argmax(m_test, axis=1)
    else:
        k_cross = kernel.cross_matrix(test_features, x, partner_spec)
        test_predictions = partner.predict_labels(partner_model, k_cross)

    return RunReport(
        iterations_run=len(snapshots),
        trajectories=snapshots,
        final_partner=partner_model,
        final_state=state,
        train_predictions=train_predictions,
        test_predictions=test_predictions,
    )


def run_base_alone(
    dataset: PartialLabelDataset,
    test_features: np.ndarray,
    kind: base_mod.BaseClassifierKind,
) -> tuple[np.ndarray, np.ndarray]:
    """Reference run of the base classifier without any partner feedback.

    Trains once on the uniform initial confidences and returns the
    (train, test) label vectors. Train labels take the argmax over the
    candidate set; unseen test samples have no candidate mask.
    """
    x = dataset.features
    test_features = _as_test_matrix(dataset, test_features)
    kind_eff = kind
    if kind.kind == "kernel-ls":
        kind_eff = replace(kind, kernel=_pin_sigma(kind.kernel, x))
    p0 = dataset.candidates / dataset.candidates.sum(axis=1, keepdims=True)
    m_train = base_mod.fit_predict_base(kind_eff, dataset, p0)
    train_labels = _masked_argmax(m_train, dataset.candidates)
    if test_features.shape[0] == 0:
        return train_labels, np.zeros(0, dtype=int)
    m_test = base_mod.query_outputs(kind_eff, dataset, p0, test_features)
    return train_labels, np.argmax(m_test, axis=1)
