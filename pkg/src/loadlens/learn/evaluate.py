"""Model evaluation: MAE/MRD, confusion matrix, permutation importance.

MRD (mean residual deviance) is the mean squared prediction error, the
Gaussian-deviance convention. Class decisions come from rounding the
regression output, which is what reconciles regression-style error metrics
with a confusion-matrix accuracy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyEvalSet
from ..features import SessionFeatures
from ..ingest import DEFAULT_ACTIVITIES
from .data import build_xy, decode_prediction, get_preset, split
from .models import DnnConfig, fit_dnn, fit_lrm


@dataclass(frozen=True)
class EvalMetrics:
    """Error metrics plus the decoded-class confusion matrix of one split."""

    mae: float
    mrd: float
    confusion: np.ndarray
    accuracy: float


def evaluate_xy(model, X, y, n_classes: int = len(DEFAULT_ACTIVITIES)) -> EvalMetrics:
    y = np.asarray(y, dtype=float)
    if len(y) == 0:
        raise EmptyEvalSet("no rows to evaluate")
    yhat = model.predict(X)
    resid = yhat - y
    mae = float(np.abs(resid).mean())
    mrd = float((resid * resid).mean())
    confusion = np.zeros((n_classes, n_classes), dtype=int)
    for t, p in zip(y, yhat):
        confusion[int(t), decode_prediction(float(p), n_classes)] += 1
    accuracy = float(np.trace(confusion) / confusion.sum())
    return EvalMetrics(mae=mae, mrd=mrd, confusion=confusion, accuracy=accuracy)


def evaluate(model, rows: list[SessionFeatures], labels=DEFAULT_ACTIVITIES) -> EvalMetrics:
    """Evaluate a fitted model on feature rows (missing-feature rows dropped)."""
    X, y, kept = build_xy(rows, model.features, labels)
    if not kept:
        raise EmptyEvalSet("no usable rows (all have missing features)")
    return evaluate_xy(model, X, y, n_classes=len(labels))


def permutation_importance(
    model,
    rows: list[SessionFeatures],
    seed: int = 0,
    repeats: int = 10,
    labels=DEFAULT_ACTIVITIES,
) -> list[tuple[str, float]]:
    """Mean MRD increase when one feature column is shuffled, normalized to
    sum 1.

    Negative raw deltas are floored at 0; if every feature comes out 0 the
    importances fall back to uniform (with a warning), since nothing can be
    ranked.
    """
    X, y, kept = build_xy(rows, model.features, labels)
    if len(kept) < 10:
        raise EmptyEvalSet(f"permutation importance needs >= 10 rows, got {len(kept)}")
    rng = np.random.default_rng(seed)
    baseline = evaluate_xy(model, X, y, n_classes=len(labels)).mrd
    p = X.shape[1]
    raw = np.zeros(p)
    for j in range(p):
        deltas = []
        for _ in range(repeats):
            Xp = X.copy()
            Xp[:, j] = Xp[rng.permutation(len(Xp)), j]
            deltas.append(evaluate_xy(model, Xp, y, n_classes=len(labels)).mrd - baseline)
        raw[j] = max(0.0, float(np.mean(deltas)))
    total = raw.sum()
    if total == 0.0:
        warnings.warn("all permutation importances are zero; reporting uniform weights")
        raw = np.full(p, 1.0 / p)
        total = 1.0
    return list(zip(model.features, (raw / total).tolist()))


@dataclass(frozen=True)
class EvalReport:
    """Full training record: loss curves, split metrics, importances."""

    model_kind: str
    preset: str
    train_loss: list[float]
    val_loss: list[float]
    mae_val: float
    mrd_val: float
    mae_pred: float
    mrd_pred: float
    confusion: np.ndarray
    accuracy: float
    accuracy_val: float
    importances: list[tuple[str, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model_kind,
            "preset": self.preset,
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "mae_val": self.mae_val,
            "mrd_val": self.mrd_val,
            "mae_pred": self.mae_pred,
            "mrd_pred": self.mrd_pred,
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "accuracy_val": self.accuracy_val,
            "importances": [[name, v] for name, v in self.importances],
        }


def run_training(
    rows: list[SessionFeatures],
    model_kind: str,
    preset,
    config: DnnConfig = DnnConfig(),
    split_seed: int = 0,
    fractions=(0.7, 0.15, 0.15),
    labels=DEFAULT_ACTIVITIES,
):
    """Split, fit, and evaluate one model; returns (model, EvalReport).

    The confusion matrix and accuracy are reported on the prediction split;
    importances on the validation split (empty when it is too small to
    permute meaningfully).
    """
    preset = get_preset(preset)
    train, val, pred = split(rows, fractions=fractions, seed=split_seed)
    if model_kind == "lrm":
        model = fit_lrm(train, preset, labels)
        train_losses: list[float] = []
        val_losses: list[float] = []
    elif model_kind == "dnn":
        model, train_losses, val_losses = fit_dnn(train, val, preset, config, labels)
    else:
        raise ValueError(f"unknown model kind {model_kind!r}; use 'lrm' or 'dnn'")
    ev_val = evaluate(model, val, labels)
    ev_pred = evaluate(model, pred, labels)
    try:
        importances = permutation_importance(model, val, seed=config.seed, labels=labels)
    except EmptyEvalSet:
        importances = []
    report = EvalReport(
        model_kind=model_kind,
        preset=preset.name,
        train_loss=train_losses,
        val_loss=val_losses,
        mae_val=ev_val.mae,
        mrd_val=ev_val.mrd,
        mae_pred=ev_pred.mae,
        mrd_pred=ev_pred.mrd,
        confusion=ev_pred.confusion,
        accuracy=ev_pred.accuracy,
        accuracy_val=ev_val.accuracy,
        importances=importances,
    )
    return model, report
