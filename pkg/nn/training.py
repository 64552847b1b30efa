# nn/training.py
"""
Forward/backward passes and the mini-batch training loop.
"""

import csv
import logging
import math
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFAULT_SEED, REPORT_FLOAT_FORMAT, TRAIN_DEFAULTS
from errors import ConfigError, NonFiniteGradient, ShapeMismatch
from .layers import DenseLayer, Network
from .losses import Loss
from .optimizers import OptimizerState

logger = logging.getLogger("NN")


@dataclass
class TrainConfig:
    epochs: int = TRAIN_DEFAULTS["epochs"]
    batch_size: int = TRAIN_DEFAULTS["batch_size"]
    seed: int = DEFAULT_SEED
    loss: Loss = Loss.MSE
    shuffle_each_epoch: bool = TRAIN_DEFAULTS["shuffle_each_epoch"]
    log_every: int = TRAIN_DEFAULTS["log_every"]

    def __post_init__(self):
        if isinstance(self.loss, str):
            self.loss = Loss(self.loss)
        if int(self.epochs) < 1:
            raise ConfigError("epochs must be >= 1", epochs=self.epochs)
        if int(self.batch_size) < 1:
            raise ConfigError("batch_size must be >= 1", batch_size=self.batch_size)
        self.epochs = int(self.epochs)
        self.batch_size = int(self.batch_size)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["loss"] = self.loss._value_
        return data


@dataclass
class TrainHistory:
    """Per-epoch losses; accuracies are recorded for BCE training only."""
    train_loss: List[float] = field(default_factory=list)
    val_loss: List[float] = field(default_factory=list)
    train_acc: List[float] = field(default_factory=list)
    val_acc: List[float] = field(default_factory=list)
    wall_time: List[float] = field(default_factory=list)
    steps_per_epoch: int = 0

    @property
    def epochs_completed(self) -> int:
        return len(self.train_loss)

    @property
    def final_val_loss(self) -> Optional[float]:
        return self.val_loss[-1] if self.val_loss else None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self, path: Union[str, Path]) -> None:
        fmt = REPORT_FLOAT_FORMAT.format

        def cell(values, i):
            return fmt(values[i]) if i < len(values) else ""

        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["epoch", "train_loss", "val_loss", "train_acc", "val_acc", "wall_time"])
            for i in range(self.epochs_completed):
                writer.writerow([
                    i + 1,
                    cell(self.train_loss, i),
                    cell(self.val_loss, i),
                    cell(self.train_acc, i),
                    cell(self.val_acc, i),
                    cell(self.wall_time, i),
                ])


def steps_per_epoch(n_train: int, batch_size: int) -> int:
    return math.ceil(n_train / batch_size)


def _layers(net: Union[Network, Sequence[DenseLayer]]) -> Sequence[DenseLayer]:
    return net.layers if isinstance(net, Network) else net


def forward(net: Union[Network, Sequence[DenseLayer]], batch: np.ndarray) -> List[np.ndarray]:
    """
    Returns [input, a_1, ..., a_L]; the last entry is the network output and
    the intermediates are kept for backprop.
    """
    x = np.asarray(batch, dtype=np.float64)
    layers = _layers(net)
    if x.ndim != 2 or x.shape[1] != layers[0].in_dim:
        raise ShapeMismatch("Batch width does not match first layer",
                            width=x.shape[-1] if x.ndim else None, in_dim=layers[0].in_dim)
    activations = [x]
    for layer in layers:
        activations.append(layer.forward(activations[-1]))
    return activations


def backward(
    net: Union[Network, Sequence[DenseLayer]],
    activations: List[np.ndarray],
    targets: np.ndarray,
    loss: Loss,
) -> List[np.ndarray]:
    """
    Exact gradients of the batch-mean loss.

    Returns [dW_1, db_1, ..., dW_L, db_L], aligned with Network.parameters().
    """
    layers = _layers(net)
    if len(activations) != len(layers) + 1:
        raise ShapeMismatch("Activation list does not match layer count",
                            activations=len(activations), layers=len(layers))
    output = activations[-1]
    targets = np.asarray(targets, dtype=np.float64)
    if targets.shape != output.shape:
        raise ShapeMismatch("Targets do not match output shape", targets=targets.shape, output=output.shape)

    grads: List[np.ndarray] = [None] * (2 * len(layers))
    delta = loss.gradient(output, targets) * layers[-1].activation.derivative(output)
    for l in range(len(layers) - 1, -1, -1):
        a_prev = activations[l]
        grads[2 * l] = delta.T @ a_prev
        grads[2 * l + 1] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ layers[l].weights) * layers[l - 1].activation.derivative(a_prev)
    return grads


def _accuracy(outputs: np.ndarray, targets: np.ndarray) -> float:
    return float(np.mean((outputs >= 0.5) == (targets >= 0.5)))


def fit(
    net: Network,
    inputs: np.ndarray,
    targets: np.ndarray,
    config: TrainConfig,
    optimizer: OptimizerState,
    val_inputs: Optional[np.ndarray] = None,
    val_targets: Optional[np.ndarray] = None,
    tag: str = "NN",
) -> TrainHistory:
    """
    Mini-batch training for ``config.epochs`` epochs of
    ceil(n_train / batch_size) steps each. Deterministic for a fixed seed.

    Train loss is the batch-size-weighted mean of the per-step losses;
    validation loss is a full pass after the epoch.
    """
    x = np.asarray(inputs, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64)
    if x.shape[0] != y.shape[0]:
        raise ShapeMismatch("Inputs and targets have different row counts", inputs=x.shape[0], targets=y.shape[0])
    if x.shape[0] == 0:
        raise ShapeMismatch("No training rows")
    has_val = val_inputs is not None and val_targets is not None and len(val_inputs) > 0
    if has_val:
        xv = np.asarray(val_inputs, dtype=np.float64)
        yv = np.asarray(val_targets, dtype=np.float64)

    log = logging.getLogger(tag)
    rng = np.random.default_rng(config.seed)
    n = x.shape[0]
    history = TrainHistory(steps_per_epoch=steps_per_epoch(n, config.batch_size))
    params = net.parameters()
    track_acc = config.loss is Loss.BINARY_CROSS_ENTROPY

    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        order = rng.permutation(n) if config.shuffle_each_epoch else np.arange(n)
        loss_sum = 0.0
        correct = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            acts = forward(net, x[idx])
            batch_loss = config.loss.value(acts[-1], y[idx])
            if not math.isfinite(batch_loss):
                raise NonFiniteGradient("Loss became non-finite", epoch=epoch)
            loss_sum += batch_loss * len(idx)
            if track_acc:
                correct += _accuracy(acts[-1], y[idx]) * len(idx)
            grads = backward(net, acts, y[idx], config.loss)
            optimizer.step(params, grads)

        history.train_loss.append(loss_sum / n)
        if track_acc:
            history.train_acc.append(correct / n)
        if has_val:
            out = net.predict(xv)
            history.val_loss.append(config.loss.value(out, yv))
            if track_acc:
                history.val_acc.append(_accuracy(out, yv))
        history.wall_time.append(time.perf_counter() - started)

        message = (f"epoch {epoch}/{config.epochs} loss={history.train_loss[-1]:.6f}"
                   + (f" val_loss={history.val_loss[-1]:.6f}" if has_val else ""))
        if config.log_every and (epoch % config.log_every == 0 or epoch == config.epochs):
            log.info(message)
        else:
            log.debug(message)

    return history
