# nn/optimizers.py
"""
Adaptive gradient optimizers.

    rmsprop:  acc = rho*acc + (1-rho)*g^2;        w -= lr * g / (sqrt(acc) + eps)
    adam:     bias-corrected first/second moments; w -= lr * m_hat / (sqrt(v_hat) + eps)
    adadelta: Eg = rho*Eg + (1-rho)*g^2;           dx = -sqrt(Edx+eps)/sqrt(Eg+eps) * g
              w += lr * dx;                        Edx = rho*Edx + (1-rho)*dx^2
"""

import copy
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from config import OPTIMIZER_DEFAULTS
from errors import ConfigError, NonFiniteGradient, ShapeMismatch


class OptimizerKind(Enum):
    ADADELTA = "adadelta"
    ADAM = "adam"
    RMSPROP = "rmsprop"


class OptimizerState:
    """
    Hyperparameters plus per-parameter accumulators.

    Accumulators are zero arrays created on the first step with the shape of
    each parameter.
    """

    kind: OptimizerKind
    SLOTS: tuple = ()

    def __init__(self, **hyperparams):
        defaults = OPTIMIZER_DEFAULTS[self.kind.value]
        unknown = set(hyperparams) - set(defaults)
        if unknown:
            raise ConfigError(f"Unknown {self.kind.value} hyperparameters: {sorted(unknown)}")
        self.hyperparams: Dict[str, float] = {**defaults, **{k: float(v) for k, v in hyperparams.items()}}
        self.accumulators: Dict[str, List[np.ndarray]] = {}
        self.iterations = 0

    def _init_slots(self, params: List[np.ndarray]) -> None:
        self.accumulators = {slot: [np.zeros_like(p) for p in params] for slot in self.SLOTS}

    def step(self, params: List[np.ndarray], gradients: List[np.ndarray]) -> List[np.ndarray]:
        """Update ``params`` in place and return them."""
        if len(params) != len(gradients):
            raise ShapeMismatch("Parameter and gradient counts differ", params=len(params), grads=len(gradients))
        for p, g in zip(params, gradients):
            if p.shape != g.shape:
                raise ShapeMismatch("Gradient shape differs from parameter", param=p.shape, grad=g.shape)
            if not np.all(np.isfinite(g)):
                raise NonFiniteGradient("Gradient contains NaN or Inf", iteration=self.iterations)

        if not self.accumulators:
            self._init_slots(params)
        self.iterations += 1
        for i, (p, g) in enumerate(zip(params, gradients)):
            p -= self._delta(i, g)
        return params

    def _delta(self, i: int, g: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def clone(self) -> "OptimizerState":
        """Fresh state with the same hyperparameters."""
        return self.__class__(**self.hyperparams)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, **self.hyperparams}


class RMSProp(OptimizerState):
    kind = OptimizerKind.RMSPROP
    SLOTS = ("square_avg",)

    def _delta(self, i, g):
        h = self.hyperparams
        acc = self.accumulators["square_avg"][i]
        acc *= h["rho"]
        acc += (1.0 - h["rho"]) * g * g
        return h["learning_rate"] * g / (np.sqrt(acc) + h["epsilon"])


class Adam(OptimizerState):
    kind = OptimizerKind.ADAM
    SLOTS = ("m", "v")

    def _delta(self, i, g):
        h = self.hyperparams
        m = self.accumulators["m"][i]
        v = self.accumulators["v"][i]
        m *= h["beta1"]
        m += (1.0 - h["beta1"]) * g
        v *= h["beta2"]
        v += (1.0 - h["beta2"]) * g * g
        t = self.iterations
        m_hat = m / (1.0 - h["beta1"] ** t)
        v_hat = v / (1.0 - h["beta2"] ** t)
        return h["learning_rate"] * m_hat / (np.sqrt(v_hat) + h["epsilon"])


class Adadelta(OptimizerState):
    kind = OptimizerKind.ADADELTA
    SLOTS = ("square_avg", "acc_delta")

    def _delta(self, i, g):
        h = self.hyperparams
        square_avg = self.accumulators["square_avg"][i]
        acc_delta = self.accumulators["acc_delta"][i]
        square_avg *= h["rho"]
        square_avg += (1.0 - h["rho"]) * g * g
        update = np.sqrt(acc_delta + h["epsilon"]) / np.sqrt(square_avg + h["epsilon"]) * g
        acc_delta *= h["rho"]
        acc_delta += (1.0 - h["rho"]) * update * update
        return h["learning_rate"] * update


_REGISTRY = {
    OptimizerKind.RMSPROP: RMSProp,
    OptimizerKind.ADAM: Adam,
    OptimizerKind.ADADELTA: Adadelta,
}


def make_optimizer(spec: Optional[dict] = None) -> OptimizerState:
    """Build an optimizer from ``{"kind": ..., <hyperparams>}``; default adadelta."""
    spec = copy.deepcopy(spec) if spec else {"kind": OptimizerKind.ADADELTA.value}
    kind_value = str(spec.pop("kind", OptimizerKind.ADADELTA.value)).lower()
    try:
        kind = OptimizerKind(kind_value)
    except ValueError:
        raise ConfigError(f"Unknown optimizer '{kind_value}'",
                          allowed=[k.value for k in OptimizerKind]) from None
    return _REGISTRY[kind](**spec)
