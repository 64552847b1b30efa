# nn/layers.py
"""
Fully-connected layers and the layer stack they form.

Model JSON:
    {"layers": [{"in", "out", "activation", "weights" (row-major), "bias"}],
     "meta": {"seed", "config", ...}}
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from errors import ConfigError, ShapeMismatch
from .activations import Activation


@dataclass
class DenseLayer:
    """y = activation(W x + b) with W of shape (out_dim, in_dim)."""
    in_dim: int
    out_dim: int
    weights: np.ndarray
    bias: np.ndarray
    activation: Activation = Activation.LINEAR

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ShapeMismatch("Layer dimensions must be positive", in_dim=self.in_dim, out_dim=self.out_dim)
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(self.out_dim, self.in_dim)
        self.bias = np.asarray(self.bias, dtype=np.float64).reshape(self.out_dim)
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ConfigError("Layer parameters must be finite")

    @classmethod
    def glorot(cls, in_dim: int, out_dim: int, activation: Activation, rng: np.random.Generator) -> "DenseLayer":
        """Glorot-uniform weights, zero bias."""
        limit = np.sqrt(6.0 / (in_dim + out_dim))
        weights = rng.uniform(-limit, limit, size=(out_dim, in_dim))
        return cls(in_dim, out_dim, weights, np.zeros(out_dim), activation)

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ShapeMismatch("Input width does not match layer in_dim",
                                width=x.shape[-1] if x.ndim else None, in_dim=self.in_dim)
        return self.activation.apply(x @ self.weights.T + self.bias)

    def to_dict(self) -> dict:
        return {
            "in": self.in_dim,
            "out": self.out_dim,
            "activation": self.activation.value,
            "weights": self.weights.reshape(-1).tolist(),
            "bias": self.bias.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DenseLayer":
        try:
            return cls(
                in_dim=int(data["in"]),
                out_dim=int(data["out"]),
                weights=np.array(data["weights"], dtype=np.float64),
                bias=np.array(data["bias"], dtype=np.float64),
                activation=Activation(data["activation"]),
            )
        except (KeyError, ValueError) as e:
            raise ConfigError(f"Invalid layer document: {e}") from e


@dataclass
class Network:
    """Ordered stack of dense layers plus free-form metadata."""
    layers: List[DenseLayer]
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.out_dim != nxt.in_dim:
                raise ShapeMismatch("Adjacent layer dimensions do not chain",
                                    out_dim=prev.out_dim, in_dim=nxt.in_dim)

    @classmethod
    def build(cls, dims: Sequence[int], activations: Sequence[Activation], seed: int,
              meta: Optional[dict] = None) -> "Network":
        """dims = [in, h1, ..., out]; one activation per layer."""
        if len(activations) != len(dims) - 1:
            raise ConfigError("Need one activation per layer", dims=list(dims), activations=len(activations))
        rng = np.random.default_rng(seed)
        layers = [
            DenseLayer.glorot(dims[i], dims[i + 1], activations[i], rng)
            for i in range(len(dims) - 1)
        ]
        return cls(layers=layers, meta={"seed": seed, **(meta or {})})

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def dims(self) -> List[int]:
        return [self.layers[0].in_dim] + [layer.out_dim for layer in self.layers]

    def parameters(self) -> List[np.ndarray]:
        """[W1, b1, W2, b2, ...] as live references."""
        params = []
        for layer in self.layers:
            params.extend([layer.weights, layer.bias])
        return params

    def predict(self, x: np.ndarray) -> np.ndarray:
        out = np.asarray(x, dtype=np.float64)
        for layer in self.layers:
            out = layer.forward(out)
        return out

    def copy(self) -> "Network":
        return Network.from_dict(json.loads(json.dumps(self.to_dict())))

    def to_dict(self) -> dict:
        return {
            "layers": [layer.to_dict() for layer in self.layers],
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Network":
        if "layers" not in data or not data["layers"]:
            raise ConfigError("Model document has no layers")
        return cls(layers=[DenseLayer.from_dict(d) for d in data["layers"]], meta=dict(data.get("meta", {})))

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, sort_keys=True)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Network":
        path = Path(path)
        if not path.is_file():
            raise ConfigError("Model file not found", file=str(path))
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))
