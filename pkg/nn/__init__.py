# nn/__init__.py
"""
Minimal dense-network engine (float64 throughout).
"""

from .activations import Activation
from .losses import Loss
from .layers import DenseLayer, Network
from .optimizers import OptimizerKind, OptimizerState, RMSProp, Adam, Adadelta, make_optimizer
from .training import TrainConfig, TrainHistory, forward, backward, fit, steps_per_epoch

__all__ = [
    "Activation",
    "Loss",
    "DenseLayer",
    "Network",
    "OptimizerKind",
    "OptimizerState",
    "RMSProp",
    "Adam",
    "Adadelta",
    "make_optimizer",
    "TrainConfig",
    "TrainHistory",
    "forward",
    "backward",
    "fit",
    "steps_per_epoch",
]
