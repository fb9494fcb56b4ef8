"""Supervised activity prediction (linear baseline + small network) and
intensity clustering."""

from .cluster import ClusterResult, kmeans
from .data import (
    PRESETS,
    FeaturePreset,
    build_xy,
    decode_prediction,
    encode_target,
    get_preset,
    split,
)
from .evaluate import (
    EvalMetrics,
    EvalReport,
    evaluate,
    evaluate_xy,
    permutation_importance,
    run_training,
)
from .models import (
    DnnConfig,
    LinearModel,
    NetworkModel,
    Standardizer,
    fit_dnn,
    fit_dnn_xy,
    fit_lrm,
    fit_lrm_xy,
    load_model,
    save_model,
)

__all__ = [
    "ClusterResult",
    "kmeans",
    "PRESETS",
    "FeaturePreset",
    "build_xy",
    "decode_prediction",
    "encode_target",
    "get_preset",
    "split",
    "EvalMetrics",
    "EvalReport",
    "evaluate",
    "evaluate_xy",
    "permutation_importance",
    "run_training",
    "DnnConfig",
    "LinearModel",
    "NetworkModel",
    "Standardizer",
    "fit_dnn",
    "fit_dnn_xy",
    "fit_lrm",
    "fit_lrm_xy",
    "load_model",
    "save_model",
]
