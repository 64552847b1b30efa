# autoencoder/sae.py
"""
Stacked autoencoder: compresses sparse intent vectors into dense embeddings.

The encoder narrows gradually (input >= h1 >= ... >= embedding), the decoder
mirrors it. The whole encoder-decoder is trained jointly on reconstruction
MSE using Train rows only.
"""

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from artifacts.fingerprint import fingerprint_config
from config import REPORT_FLOAT_FORMAT
from errors import ConfigError, ConstraintViolation, ShapeMismatch
from features import FeatureMatrix, Split
from ingest import Label
from nn import Activation, Loss, Network, TrainConfig, fit, make_optimizer

logger = logging.getLogger("AE")


@dataclass
class AEConfig:
    hidden_layers: List[int] = field(default_factory=lambda: [128, 64])
    embedding_dim: int = 32
    train: TrainConfig = field(default_factory=TrainConfig)
    optimizer: dict = field(default_factory=lambda: {"kind": "adadelta"})

    def __post_init__(self):
        self.hidden_layers = [int(h) for h in self.hidden_layers]
        self.embedding_dim = int(self.embedding_dim)
        if self.embedding_dim < 1 or any(h < 1 for h in self.hidden_layers):
            raise ConstraintViolation("Layer widths must be positive",
                                      hidden_layers=self.hidden_layers, embedding_dim=self.embedding_dim)
        # reconstruction is always MSE
        self.train = replace(self.train, loss=Loss.MSE)

    def check_widths(self, input_dim: int) -> None:
        """input_dim >= h1 >= h2 >= ... >= embedding_dim."""
        chain = [input_dim] + self.hidden_layers + [self.embedding_dim]
        if any(a < b for a, b in zip(chain, chain[1:])):
            raise ConstraintViolation("Encoder widths must be non-increasing", widths=chain)

    def with_seed(self, seed: int):
        """Copy with the training and init seed replaced."""
        return replace(self, train=replace(self.train, seed=int(seed)))

    def summary(self) -> str:
        return f"{self.hidden_layers}->{self.embedding_dim}"

    def to_dict(self) -> dict:
        return {
            "hidden_layers": list(self.hidden_layers),
            "embedding_dim": self.embedding_dim,
            "train": self.train.to_dict(),
            "optimizer": dict(self.optimizer),
        }

    @property
    def fingerprint(self) -> str:
        return fingerprint_config(self.to_dict())


@dataclass
class EmbeddingMatrix:
    """Dense embeddings aligned with the source feature rows."""
    rows: List[str]
    values: np.ndarray
    source_config: str = ""
    labels: List[Label] = field(default_factory=list)
    split: List[Split] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape[0] != len(self.rows):
            raise ShapeMismatch("Embedding rows do not match app ids",
                                rows=len(self.rows), values=self.values.shape[0])

    @property
    def embedding_dim(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path: Union[str, Path]) -> None:
        """Write ``app_id,e0..e{d-1}``."""
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["app_id"] + [f"e{i}" for i in range(self.embedding_dim)])
            for app_id, row in zip(self.rows, self.values):
                writer.writerow([app_id] + [REPORT_FLOAT_FORMAT.format(v) for v in row])


def build_sae(input_dim: int, config: AEConfig, seed: Optional[int] = None) -> Network:
    """
    Symmetric encoder/decoder, e.g. 273 -> 128 -> 64 -> 32 -> 64 -> 128 -> 273.

    Hidden layers use ReLU, the embedding layer is Linear, the reconstruction
    output is Sigmoid.
    """
    config.check_widths(input_dim)
    hidden = config.hidden_layers
    dims = [input_dim] + hidden + [config.embedding_dim] + list(reversed(hidden)) + [input_dim]
    activations = (
        [Activation.RELU] * len(hidden)
        + [Activation.LINEAR]
        + [Activation.RELU] * len(hidden)
        + [Activation.SIGMOID]
    )
    seed = config.train.seed if seed is None else seed
    return Network.build(dims, activations, seed=seed, meta={
        "kind": "autoencoder",
        "encoder_layer_count": len(hidden) + 1,
        "config": config.to_dict(),
    })


def train_ae(net: Network, features: FeatureMatrix, config: AEConfig):
    """
    Train on Train rows (targets = inputs) and track reconstruction loss on
    Validation rows.

    Returns:
        (trained network, TrainHistory)
    """
    if not features.is_split:
        raise ConfigError("Feature matrix must have train and validation rows")
    if features.n_features != net.input_dim:
        raise ShapeMismatch("Feature width does not match AE input", width=features.n_features,
                            input_dim=net.input_dim)
    x_train, _ = features.view(Split.TRAIN)
    x_val, _ = features.view(Split.VALIDATION)

    logger.info(f"Training AE {features.n_features}->{config.summary()} "
                f"on {len(x_train)} rows ({config.train.epochs} epochs, "
                f"{config.optimizer.get('kind')}, batch {config.train.batch_size})")
    history = fit(net, x_train, x_train, config.train, make_optimizer(config.optimizer),
                  val_inputs=x_val, val_targets=x_val, tag="AE")
    net.meta["val_loss"] = history.final_val_loss
    return net, history


def _encoder_layers(trained: Network):
    count = trained.meta.get("encoder_layer_count")
    if not count:
        raise ConfigError("Model is not an autoencoder (missing encoder_layer_count)")
    return trained.layers[:int(count)]


def encode(trained: Network, features: Union[FeatureMatrix, np.ndarray], rows: Optional[List[str]] = None) -> EmbeddingMatrix:
    """Run the encoder half only."""
    if isinstance(features, FeatureMatrix):
        values = features.values
        rows = features.rows
        labels, split = list(features.labels), list(features.split)
    else:
        values = np.asarray(features, dtype=np.float64)
        rows = rows if rows is not None else [str(i) for i in range(values.shape[0])]
        labels, split = [], []

    if values.ndim != 2 or values.shape[1] != trained.input_dim:
        raise ShapeMismatch("Feature width does not match AE input",
                            width=values.shape[-1] if values.ndim else None, input_dim=trained.input_dim)

    out = values
    for layer in _encoder_layers(trained):
        out = layer.forward(out)
    source = fingerprint_config(trained.meta.get("config", {}))
    return EmbeddingMatrix(rows=list(rows), values=out, source_config=source, labels=labels, split=split)


def decode(trained: Network, embeddings: np.ndarray) -> np.ndarray:
    """Run the decoder half on raw embedding values."""
    out = np.asarray(embeddings, dtype=np.float64)
    for layer in trained.layers[len(_encoder_layers(trained)):]:
        out = layer.forward(out)
    return out
