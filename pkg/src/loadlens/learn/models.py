"""Linear baseline and small feedforward network, trained on standardized
features.

Both models predict the ordinal activity code as a regression target; class
decisions come from rounding the output (see ``data.decode_prediction``).
Training is deterministic under a fixed seed and single-threaded execution.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateDesign, NonFiniteLoss, TooFewRows
from ..features import SessionFeatures
from ..ingest import DEFAULT_ACTIVITIES
from .data import build_xy, get_preset

log = logging.getLogger(__name__)

#: Condition-number threshold beyond which OLS falls back to ridge.
COND_LIMIT = 1e12
RIDGE_LAMBDA = 1e-8

#: Per-feature stds below this are treated as zero variance.
STD_FLOOR = 1e-12


@dataclass(frozen=True)
class Standardizer:
    """Per-feature mean/std computed on the training split only.

    Zero-variance features map to constant 0 so they can never inject
    non-finite values at predict time.
    """

    means: np.ndarray
    stds: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        return cls(means=X.mean(axis=0), stds=X.std(axis=0))

    def transform(self, X: np.ndarray) -> np.ndarray:
        zero = self.stds < STD_FLOOR
        scale = np.where(zero, 1.0, self.stds)
        out = (X - self.means) / scale
        out[:, zero] = 0.0
        return out


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X


@dataclass(frozen=True)
class LinearModel:
    """Ordinary least squares on standardized features (ridge fallback on
    singular designs)."""

    features: tuple[str, ...]
    standardizer: Standardizer
    weights: np.ndarray
    intercept: float
    ridge_fallback: bool = False

    @property
    def kind(self) -> str:
        return "lrm"

    def predict(self, X) -> np.ndarray:
        Z = self.standardizer.transform(_as_matrix(X))
        return Z @ self.weights + self.intercept

    def coefficients_original(self) -> tuple[np.ndarray, float]:
        """Weights and intercept expressed in raw feature units."""
        zero = self.standardizer.stds < STD_FLOOR
        scale = np.where(zero, 1.0, self.standardizer.stds)
        w = np.where(zero, 0.0, self.weights / scale)
        b = self.intercept - float((w * self.standardizer.means).sum())
        return w, b


def fit_lrm_xy(X, y, feature_names) -> LinearModel:
    """OLS with intercept on standardized features.

    If the normal-equations matrix is ill-conditioned (cond > 1e12), a ridge
    term lambda=1e-8 is added and the fallback recorded on the model.
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n < p + 2:
        raise TooFewRows(f"OLS needs >= p+2 = {p + 2} rows for {p} features, got {n}")
    std = Standardizer.fit(X)
    if bool((std.stds < STD_FLOOR).all()):
        raise DegenerateDesign("every feature is constant")
    Z = std.transform(X)
    A = np.hstack([np.ones((n, 1)), Z])
    G = A.T @ A
    rhs = A.T @ y
    ridge = False
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        ridge = True
        G = G + RIDGE_LAMBDA * np.eye(p + 1)
        log.warning("normal equations ill-conditioned (cond=%.3g); using ridge fallback", cond)
    coef = np.linalg.solve(G, rhs)
    return LinearModel(
        features=tuple(feature_names),
        standardizer=std,
        weights=coef[1:],
        intercept=float(coef[0]),
        ridge_fallback=ridge,
    )


def fit_lrm(train_rows: list[SessionFeatures], preset, labels=DEFAULT_ACTIVITIES) -> LinearModel:
    """Row-level API: fit the linear baseline on a feature preset."""
    preset = get_preset(preset)
    X, y, _ = build_xy(train_rows, preset.columns, labels)
    return fit_lrm_xy(X, y, preset.columns)


@dataclass(frozen=True)
class DnnConfig:
    hidden: tuple[int, ...] = (16, 16)
    epochs: int = 200
    lr: float = 0.01
    batch: int = 16
    seed: int = 0


def init_layers(sizes, rng) -> list[tuple[np.ndarray, np.ndarray]]:
    """Uniform init scaled by sqrt(6 / (fan_in + fan_out)); zero biases."""
    layers = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        a = np.sqrt(6.0 / (fan_in + fan_out))
        layers.append((rng.uniform(-a, a, size=(fan_in, fan_out)), np.zeros(fan_out)))
    return layers


def forward_trace(layers, X):
    """Forward pass keeping every layer's pre-activation and activation.

    Hidden layers are rectified-linear; the output layer is linear and
    squeezed to shape (n,).
    """
    acts = [np.asarray(X, dtype=float)]
    preacts = []
    for i, (W, b) in enumerate(layers):
        z = acts[-1] @ W + b
        preacts.append(z)
        acts.append(np.maximum(z, 0.0) if i < len(layers) - 1 else z)
    return acts, preacts


def forward(layers, X) -> np.ndarray:
    acts, _ = forward_trace(layers, X)
    return acts[-1][:, 0]


def loss_and_grads(layers, X, y):
    """Mean-squared-error loss and its gradients via backpropagation."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    acts, preacts = forward_trace(layers, X)
    resid = acts[-1][:, 0] - y
    loss = float((resid * resid).mean())
    delta = (2.0 / n) * resid[:, None]
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(layers)
    for i in range(len(layers) - 1, -1, -1):
        W, _ = layers[i]
        grads[i] = (acts[i].T @ delta, delta.sum(axis=0))
        if i > 0:
            delta = (delta @ W.T) * (preacts[i - 1] > 0.0)
    return loss, grads


def _mse(layers, X, y) -> float:
    r = forward(layers, X) - np.asarray(y, dtype=float)
    return float((r * r).mean())


@dataclass(frozen=True)
class NetworkModel:
    """Feedforward rectifier network with a linear scalar output."""

    features: tuple[str, ...]
    standardizer: Standardizer
    layers: list[tuple[np.ndarray, np.ndarray]] = field(compare=False)

    @property
    def kind(self) -> str:
        return "dnn"

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return tuple([self.layers[0][0].shape[0]] + [W.shape[1] for W, _ in self.layers])

    def predict(self, X) -> np.ndarray:
        return forward(self.layers, self.standardizer.transform(_as_matrix(X)))


def fit_dnn_xy(X_train, y_train, X_val, y_val, feature_names, config: DnnConfig = DnnConfig()):
    """Mini-batch gradient descent on MSE.

    Returns (model, train_losses, val_losses); the loss lists carry
    epochs + 1 entries, index 0 being the pre-training loss.
    Raises NonFiniteLoss if training diverges.
    """
    X_train = _as_matrix(X_train)
    y_train = np.asarray(y_train, dtype=float)
    if len(y_train) < 20:
        raise TooFewRows(f"network training needs >= 20 rows, got {len(y_train)}")
    std = Standardizer.fit(X_train)
    Zt = std.transform(X_train)
    Zv = std.transform(_as_matrix(X_val)) if X_val is not None and len(X_val) else None
    yv = np.asarray(y_val, dtype=float) if Zv is not None else None

    rng = np.random.default_rng(config.seed)
    sizes = (Zt.shape[1],) + tuple(config.hidden) + (1,)
    layers = init_layers(sizes, rng)

    def record(train_losses, val_losses, epoch):
        tl = _mse(layers, Zt, y_train)
        vl = _mse(layers, Zv, yv) if Zv is not None else float("nan")
        if not np.isfinite(tl) or (Zv is not None and not np.isfinite(vl)):
            raise NonFiniteLoss(epoch, tl if not np.isfinite(tl) else vl, config.lr)
        train_losses.append(tl)
        val_losses.append(vl)

    train_losses: list[float] = []
    val_losses: list[float] = []
    record(train_losses, val_losses, 0)
    n = len(y_train)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, config.batch):
            sel = order[start : start + config.batch]
            _, grads = loss_and_grads(layers, Zt[sel], y_train[sel])
            layers = [
                (W - config.lr * dW, b - config.lr * db)
                for (W, b), (dW, db) in zip(layers, grads)
            ]
        record(train_losses, val_losses, epoch)

    model = NetworkModel(features=tuple(feature_names), standardizer=std, layers=layers)
    return model, train_losses, val_losses


def fit_dnn(
    train_rows: list[SessionFeatures],
    val_rows: list[SessionFeatures],
    preset,
    config: DnnConfig = DnnConfig(),
    labels=DEFAULT_ACTIVITIES,
):
    """Row-level API mirroring fit_lrm; returns (model, train_losses, val_losses)."""
    preset = get_preset(preset)
    Xt, yt, _ = build_xy(train_rows, preset.columns, labels)
    Xv, yv, _ = build_xy(val_rows, preset.columns, labels) if val_rows else (None, None, [])
    return fit_dnn_xy(Xt, yt, Xv, yv, preset.columns, config)


def save_model(model, path) -> None:
    """Serialize to JSON; float repr round-trips bit-exactly."""
    doc = {
        "kind": model.kind,
        "features": list(model.features),
        "standardizer": {
            "means": model.standardizer.means.tolist(),
            "stds": model.standardizer.stds.tolist(),
        },
    }
    if model.kind == "lrm":
        doc["lrm"] = {
            "w": model.weights.tolist(),
            "b": model.intercept,
            "ridge_fallback": model.ridge_fallback,
        }
    else:
        doc["dnn"] = {
            "layers": [{"W": W.tolist(), "b": b.tolist()} for W, b in model.layers]
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    std = Standardizer(
        means=np.array(doc["standardizer"]["means"], dtype=float),
        stds=np.array(doc["standardizer"]["stds"], dtype=float),
    )
    features = tuple(doc["features"])
    if doc["kind"] == "lrm":
        return LinearModel(
            features=features,
            standardizer=std,
            weights=np.array(doc["lrm"]["w"], dtype=float),
            intercept=float(doc["lrm"]["b"]),
            ridge_fallback=bool(doc["lrm"].get("ridge_fallback", False)),
        )
    if doc["kind"] == "dnn":
        layers = [
            (np.array(l["W"], dtype=float), np.array(l["b"], dtype=float))
            for l in doc["dnn"]["layers"]
        ]
        return NetworkModel(features=features, standardizer=std, layers=layers)
    raise ValueError(f"unknown model kind {doc['kind']!r}")
