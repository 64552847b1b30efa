# nn/activations.py
"""Elementwise activations and their derivatives expressed through the output."""

from enum import Enum

import numpy as np


class Activation(Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"
    LINEAR = "linear"

    def apply(self, z: np.ndarray) -> np.ndarray:
        if self is Activation.RELU:
            return np.maximum(z, 0.0)
        if self is Activation.SIGMOID:
            # tanh form never overflows and gives exactly 0.5 at z = 0
            return 0.5 * (1.0 + np.tanh(0.5 * z))
        return z

    def derivative(self, a: np.ndarray) -> np.ndarray:
        """d(activation)/dz evaluated from the activation output ``a``."""
        if self is Activation.RELU:
            return (a > 0.0).astype(a.dtype)
        if self is Activation.SIGMOID:
            return a * (1.0 - a)
        return np.ones_like(a)
