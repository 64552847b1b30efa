# classifier/mlp.py
"""
MLP classifier over AE embeddings.

Hidden layers are ReLU, the output is one Sigmoid unit giving the
probability that an app is malicious (positive class).
"""

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from artifacts.fingerprint import fingerprint_config
from config import BCE_EPSILON, REPORT_FLOAT_FORMAT
from errors import ConfigError, EmptyHiddenList, ShapeMismatch
from features import Split
from ingest import Label
from nn import Activation, Loss, Network, TrainConfig, fit, make_optimizer

logger = logging.getLogger("MLP")


@dataclass
class MLPConfig:
    hidden_layers: List[int] = field(default_factory=lambda: [64, 64, 64, 64])
    train: TrainConfig = field(default_factory=TrainConfig)
    optimizer: dict = field(default_factory=lambda: {"kind": "adadelta"})

    def __post_init__(self):
        self.hidden_layers = [int(h) for h in self.hidden_layers]
        if any(h < 1 for h in self.hidden_layers):
            raise ConfigError("Hidden layer sizes must be positive", hidden_layers=self.hidden_layers)
        self.train = replace(self.train, loss=Loss.BINARY_CROSS_ENTROPY)

    def with_seed(self, seed: int):
        return replace(self, train=replace(self.train, seed=int(seed)))

    def summary(self) -> str:
        return str(self.hidden_layers)

    def to_dict(self) -> dict:
        return {
            "hidden_layers": list(self.hidden_layers),
            "train": self.train.to_dict(),
            "optimizer": dict(self.optimizer),
        }

    @property
    def fingerprint(self) -> str:
        return fingerprint_config(self.to_dict())


@dataclass
class ScoreVector:
    """Malware probability per app, with ground truth when known."""
    app_ids: List[str]
    scores: np.ndarray
    labels: List[Label] = field(default_factory=list)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        if len(self.app_ids) != len(self.scores):
            raise ShapeMismatch("Scores and app ids differ in length",
                                app_ids=len(self.app_ids), scores=len(self.scores))
        if self.labels and len(self.labels) != len(self.scores):
            raise ShapeMismatch("Scores and labels differ in length",
                                labels=len(self.labels), scores=len(self.scores))

    def __len__(self) -> int:
        return len(self.scores)

    @property
    def positives(self) -> np.ndarray:
        """Boolean mask of malicious ground truth."""
        return np.array([lab is Label.MALICIOUS for lab in self.labels], dtype=bool)

    @property
    def negatives(self) -> np.ndarray:
        return np.array([lab is Label.BENIGN for lab in self.labels], dtype=bool)

    @classmethod
    def from_arrays(cls, scores, is_malicious, app_ids: Optional[List[str]] = None) -> "ScoreVector":
        """Convenience constructor from a score array and a boolean/0-1 label array."""
        scores = np.asarray(scores, dtype=np.float64).reshape(-1)
        labels = [Label.MALICIOUS if bool(v) else Label.BENIGN for v in np.asarray(is_malicious).reshape(-1)]
        app_ids = app_ids or [f"app{i:05d}" for i in range(len(scores))]
        return cls(app_ids=app_ids, scores=scores, labels=labels)

    def subset(self, mask: np.ndarray) -> "ScoreVector":
        idx = np.flatnonzero(mask)
        return ScoreVector(
            app_ids=[self.app_ids[i] for i in idx],
            scores=self.scores[idx],
            labels=[self.labels[i] for i in idx] if self.labels else [],
        )

    def to_csv(self, path: Union[str, Path]) -> None:
        """Write ``app_id,score,label``."""
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["app_id", "score", "label"])
            for i, app_id in enumerate(self.app_ids):
                label = self.labels[i].value if self.labels else Label.UNLABELED.value
                writer.writerow([app_id, REPORT_FLOAT_FORMAT.format(self.scores[i]), label])

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "ScoreVector":
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            rows = list(reader)
        return cls(
            app_ids=[r["app_id"] for r in rows],
            scores=np.array([float(r["score"]) for r in rows], dtype=np.float64),
            labels=[Label.parse(r["label"], allow_unlabeled=True) for r in rows],
        )


def build_mlp(embedding_dim: int, config: MLPConfig, seed: Optional[int] = None) -> Network:
    """embedding_dim -> h1 -> ... -> hk -> 1 with ReLU hidden layers and a Sigmoid output."""
    if embedding_dim < 1:
        raise ConfigError("embedding_dim must be >= 1", embedding_dim=embedding_dim)
    if not config.hidden_layers:
        raise EmptyHiddenList("MLP needs at least one hidden layer")
    dims = [embedding_dim] + config.hidden_layers + [1]
    activations = [Activation.RELU] * len(config.hidden_layers) + [Activation.SIGMOID]
    seed = config.train.seed if seed is None else seed
    return Network.build(dims, activations, seed=seed, meta={
        "kind": "mlp",
        "config": config.to_dict(),
    })


def _split_rows(embeddings, labels: Optional[List[Label]], split: Optional[List[Split]]):
    labels = labels if labels is not None else embeddings.labels
    split = split if split is not None else embeddings.split
    if len(labels) != len(embeddings.rows) or len(split) != len(embeddings.rows):
        raise ShapeMismatch("Embeddings, labels and split must align",
                            rows=len(embeddings.rows), labels=len(labels), split=len(split))
    targets = np.array([[lab.target if lab.target is not None else np.nan] for lab in labels],
                       dtype=np.float64).reshape(-1, 1)
    train = np.array([s is Split.TRAIN for s in split], dtype=bool)
    val = np.array([s is Split.VALIDATION for s in split], dtype=bool)
    if not train.any():
        raise ConfigError("No Train rows in split assignment")
    if np.isnan(targets[train]).any() or np.isnan(targets[val]).any():
        raise ConfigError("Training and validation rows must be labeled")
    return targets, train, val


def train_mlp(net: Network, embeddings, config: MLPConfig,
              labels: Optional[List[Label]] = None, split: Optional[List[Split]] = None):
    """
    BCE training on Train rows with validation loss tracked per epoch.

    ``labels`` and ``split`` default to those carried by the EmbeddingMatrix.

    Returns:
        (trained network, TrainHistory)
    """
    if embeddings.embedding_dim != net.input_dim:
        raise ShapeMismatch("Embedding width does not match MLP input",
                            width=embeddings.embedding_dim, input_dim=net.input_dim)
    targets, train, val = _split_rows(embeddings, labels, split)
    x = embeddings.values

    logger.info(f"Training MLP {embeddings.embedding_dim}->{config.summary()}->1 "
                f"on {int(train.sum())} rows ({config.train.epochs} epochs, "
                f"{config.optimizer.get('kind')}, batch {config.train.batch_size})")
    history = fit(net, x[train], targets[train], config.train, make_optimizer(config.optimizer),
                  val_inputs=x[val], val_targets=targets[val], tag="MLP")
    return net, history


def predict(trained: Network, embeddings) -> ScoreVector:
    """Sigmoid scores for every embedding row, kept strictly inside (0, 1)."""
    values = embeddings.values
    if values.ndim != 2 or values.shape[1] != trained.input_dim:
        raise ShapeMismatch("Embedding width does not match MLP input",
                            width=values.shape[-1] if values.ndim else None, input_dim=trained.input_dim)
    scores = np.clip(trained.predict(values).reshape(-1), BCE_EPSILON, 1.0 - BCE_EPSILON)
    return ScoreVector(app_ids=list(embeddings.rows), scores=scores, labels=list(embeddings.labels))
