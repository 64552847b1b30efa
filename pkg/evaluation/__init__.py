# evaluation/__init__.py
from .metrics import (
    RocCurve,
    Confusion,
    ThresholdPolicy,
    ThresholdReport,
    EvalReport,
    roc_auc,
    trapezoidal_auc,
    confusion_at,
    metrics_at_threshold,
    candidate_thresholds,
    select_threshold,
    evaluate,
)
from .plotting import plot_roc

__all__ = [
    'RocCurve',
    'Confusion',
    'ThresholdPolicy',
    'ThresholdReport',
    'EvalReport',
    'roc_auc',
    'trapezoidal_auc',
    'confusion_at',
    'metrics_at_threshold',
    'candidate_thresholds',
    'select_threshold',
    'evaluate',
    'plot_roc',
]
