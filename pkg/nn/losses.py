# nn/losses.py
"""
Batch-mean losses.

MSE is the mean over every output element (per-feature mean). BCE clamps
outputs to [eps, 1 - eps] before the log; the gradient is that of the clamped
loss, so it is zero where the clamp is active.
"""

from enum import Enum

import numpy as np

from config import BCE_EPSILON
from errors import ShapeMismatch


class Loss(Enum):
    MSE = "mse"
    BINARY_CROSS_ENTROPY = "binary_crossentropy"

    def value(self, outputs: np.ndarray, targets: np.ndarray) -> float:
        _check(outputs, targets)
        if self is Loss.MSE:
            return float(np.mean((outputs - targets) ** 2))
        p = np.clip(outputs, BCE_EPSILON, 1.0 - BCE_EPSILON)
        return float(-np.mean(targets * np.log(p) + (1.0 - targets) * np.log(1.0 - p)))

    def gradient(self, outputs: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """dLoss/dOutputs for the batch mean."""
        _check(outputs, targets)
        n = outputs.size
        if self is Loss.MSE:
            return 2.0 * (outputs - targets) / n
        p = np.clip(outputs, BCE_EPSILON, 1.0 - BCE_EPSILON)
        inside = (outputs > BCE_EPSILON) & (outputs < 1.0 - BCE_EPSILON)
        grad = (-(targets / p) + (1.0 - targets) / (1.0 - p)) / n
        return np.where(inside, grad, 0.0)


def _check(outputs: np.ndarray, targets: np.ndarray) -> None:
    if outputs.shape != targets.shape:
        raise ShapeMismatch("Output and target shapes differ",
                            outputs=outputs.shape, targets=targets.shape)
