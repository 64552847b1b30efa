# evaluation/metrics.py
"""
ROC/AUC and threshold selection for malware scores.

Positive class = malicious. A score >= threshold is predicted positive.
AUC is the Mann-Whitney pair statistic (ties credited 0.5), computed from
mid-ranks so it stays O(n log n).
"""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.stats import rankdata

from config import REPORT_FLOAT_FORMAT
from errors import ConfigError, SingleClass
from classifier import ScoreVector

logger = logging.getLogger("EVAL")


def _round(value: float) -> float:
    return float(REPORT_FLOAT_FORMAT.format(value))


def _labeled(scores: ScoreVector) -> Tuple[np.ndarray, np.ndarray]:
    """Scores and positive mask restricted to rows with ground truth."""
    pos = scores.positives
    neg = scores.negatives
    keep = pos | neg
    return scores.scores[keep], pos[keep]


def _require_both(y: np.ndarray) -> Tuple[int, int]:
    n_pos = int(y.sum())
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("Both malicious and benign samples are required", positives=n_pos, negatives=n_neg)
    return n_pos, n_neg


@dataclass
class RocCurve:
    """
    ROC points ordered by threshold descending.

    The first point uses threshold +inf (nothing flagged) so the curve
    always starts at (0, 0); the last uses the minimum score and ends at (1, 1).
    """
    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    @property
    def points(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.thresholds.tolist(), self.fpr.tolist(), self.tpr.tolist()))

    def to_csv(self, path: Union[str, Path]) -> None:
        fmt = REPORT_FLOAT_FORMAT.format
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["threshold", "fpr", "tpr"])
            for t, x, y in self.points:
                writer.writerow(["inf" if math.isinf(t) else fmt(t), fmt(x), fmt(y)])


def trapezoidal_auc(fpr: np.ndarray, tpr: np.ndarray) -> float:
    """Area under a piecewise-linear ROC curve."""
    fpr = np.asarray(fpr, dtype=np.float64)
    tpr = np.asarray(tpr, dtype=np.float64)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def roc_auc(scores: ScoreVector) -> RocCurve:
    s, y = _labeled(scores)
    n_pos, n_neg = _require_both(y)

    ranks = rankdata(s, method="average")
    auc = (ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)

    distinct = np.unique(s)[::-1]
    pos_sorted = np.sort(s[y])
    neg_sorted = np.sort(s[~y])
    # counts of scores >= t per class
    tp = n_pos - np.searchsorted(pos_sorted, distinct, side="left")
    fp = n_neg - np.searchsorted(neg_sorted, distinct, side="left")

    thresholds = np.concatenate([[np.inf], distinct])
    fpr = np.concatenate([[0.0], fp / n_neg])
    tpr = np.concatenate([[0.0], tp / n_pos])
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr, auc=float(auc))


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def accuracy(self) -> float:
        total = self.tp + self.fp + self.tn + self.fn
        return (self.tp + self.tn) / total if total else 0.0

    @property
    def fpr(self) -> float:
        if self.fp + self.tn == 0:
            raise SingleClass("FPR undefined without benign samples")
        return self.fp / (self.fp + self.tn)

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def confusion_at(scores: ScoreVector, t: float) -> Confusion:
    s, y = _labeled(scores)
    flagged = s >= t
    return Confusion(
        tp=int(np.sum(flagged & y)),
        fp=int(np.sum(flagged & ~y)),
        tn=int(np.sum(~flagged & ~y)),
        fn=int(np.sum(~flagged & y)),
    )


def metrics_at_threshold(scores: ScoreVector, t: float) -> Tuple[float, float, float, float, float]:
    """(accuracy, fpr, precision, recall, f1) at threshold t."""
    if not 0.0 <= t <= 1.0:
        raise ConfigError("Threshold must be within [0, 1]", threshold=t)
    c = confusion_at(scores, t)
    return c.accuracy, c.fpr, c.precision, c.recall, c.f1


class ThresholdPolicy(Enum):
    FIXED_05 = "fixed_0.5"
    BEST_ACCURACY = "best_accuracy"
    BEST_F1 = "best_f1"


@dataclass
class ThresholdReport:
    policy: ThresholdPolicy
    threshold: float
    accuracy: float
    fpr: float
    f1: float
    precision: float = 0.0
    recall: float = 0.0

    def to_dict(self) -> dict:
        return {
            "policy": self.policy.value,
            "threshold": _round(self.threshold),
            "accuracy": _round(self.accuracy),
            "fpr": _round(self.fpr),
            "f1": _round(self.f1),
            "precision": _round(self.precision),
            "recall": _round(self.recall),
        }


def candidate_thresholds(scores: np.ndarray) -> np.ndarray:
    """Midpoints between adjacent distinct scores plus 0 and 1, descending."""
    distinct = np.unique(scores)
    mids = (distinct[1:] + distinct[:-1]) / 2.0
    candidates = np.unique(np.concatenate([[0.0, 1.0], mids]))
    return candidates[::-1]


def _sweep(s: np.ndarray, y: np.ndarray, candidates: np.ndarray) -> Dict[str, np.ndarray]:
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    pos_sorted = np.sort(s[y])
    neg_sorted = np.sort(s[~y])
    tp = n_pos - np.searchsorted(pos_sorted, candidates, side="left")
    fp = n_neg - np.searchsorted(neg_sorted, candidates, side="left")
    tn = n_neg - fp
    accuracy = (tp + tn) / (n_pos + n_neg)
    precision = np.divide(tp, tp + fp, out=np.zeros(len(candidates)), where=(tp + fp) > 0)
    recall = tp / n_pos
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros(len(candidates)), where=denom > 0)
    return {"accuracy": accuracy, "f1": f1}


def select_threshold(scores: ScoreVector, policy: ThresholdPolicy) -> ThresholdReport:
    """
    Fixed05 uses t=0.5. BestAccuracy/BestF1 scan every candidate threshold;
    among equal maxima the larger threshold (lower FPR) wins. A winner that
    classifies every sample exactly as t=0.5 does is reported as 0.5.
    """
    s, y = _labeled(scores)
    _require_both(y)

    if policy is ThresholdPolicy.FIXED_05:
        t = 0.5
    else:
        candidates = candidate_thresholds(s)
        curve = _sweep(s, y, candidates)
        key = "accuracy" if policy is ThresholdPolicy.BEST_ACCURACY else "f1"
        # candidates are descending, argmax keeps the first (largest) maximum
        t = float(candidates[int(np.argmax(curve[key]))])
        # same confusion matrix as the conventional cut: report 0.5
        if confusion_at(scores, 0.5) == confusion_at(scores, t):
            t = 0.5

    c = confusion_at(scores, t)
    return ThresholdReport(policy=policy, threshold=t, accuracy=c.accuracy, fpr=c.fpr,
                           f1=c.f1, precision=c.precision, recall=c.recall)


@dataclass
class EvalReport:
    """AUC plus the three threshold readouts for one scored set."""
    auc: float
    reports: Dict[ThresholdPolicy, ThresholdReport]
    n_positive: int = 0
    n_negative: int = 0
    meta: dict = field(default_factory=dict)

    def __getitem__(self, policy: ThresholdPolicy) -> ThresholdReport:
        return self.reports[policy]

    @property
    def converged(self) -> bool:
        """True when all three policies land on the same accuracy and FPR."""
        accs = {_round(r.accuracy) for r in self.reports.values()}
        fprs = {_round(r.fpr) for r in self.reports.values()}
        return len(accs) == 1 and len(fprs) == 1

    def to_dict(self) -> dict:
        return {
            "auc": _round(self.auc),
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
            "thresholds": [self.reports[p].to_dict() for p in ThresholdPolicy],
            "meta": self.meta,
        }

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)


def evaluate(scores: ScoreVector, meta: Optional[dict] = None) -> Tuple[EvalReport, RocCurve]:
    """ROC plus every threshold policy in one pass."""
    curve = roc_auc(scores)
    reports = {p: select_threshold(scores, p) for p in ThresholdPolicy}
    _, y = _labeled(scores)
    report = EvalReport(auc=curve.auc, reports=reports, n_positive=int(y.sum()),
                        n_negative=int((~y).sum()), meta=dict(meta or {}))
    logger.info(f"AUC={curve.auc:.6f} acc@0.5={reports[ThresholdPolicy.FIXED_05].accuracy:.6f} "
                f"fpr@0.5={reports[ThresholdPolicy.FIXED_05].fpr:.6f}")
    return report, curve
