# pipeline.py
"""
Pipeline configuration files (JSON).

Every file is checked against a field-rule table: unknown keys are
rejected, values are type/range checked and missing keys take their
defaults. The resolved dict (defaults filled in) is what gets recorded
in the RunManifest.
"""

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from autoencoder import AEConfig
from classifier import MLPConfig
from config import (
    BEST_E2E,
    DEFAULT_BINARIZE,
    DEFAULT_SEED,
    DEFAULT_TRAIN_FRACTION,
    STANDARD_MLP,
    TRAIN_DEFAULTS,
)
from errors import ConfigError
from nn import OptimizerKind, TrainConfig

# ============================================
# Field rules
# ============================================

TRAIN_FIELDS = {
    "epochs": {"type": int, "min": 1, "default": TRAIN_DEFAULTS["epochs"]},
    "batch_size": {"type": int, "min": 1, "default": TRAIN_DEFAULTS["batch_size"]},
    "shuffle_each_epoch": {"type": bool, "default": TRAIN_DEFAULTS["shuffle_each_epoch"]},
    "log_every": {"type": int, "min": 0, "default": TRAIN_DEFAULTS["log_every"]},
}

# Hyperparameters without a default fall back to the optimizer's own defaults
OPTIMIZER_FIELDS = {
    "kind": {"type": str, "allowed": [k.value for k in OptimizerKind], "default": OptimizerKind.ADADELTA.value},
    "learning_rate": {"type": float, "min": 0.0},
    "rho": {"type": float, "min": 0.0, "max": 1.0},
    "epsilon": {"type": float, "min": 0.0},
    "beta1": {"type": float, "min": 0.0, "max": 1.0},
    "beta2": {"type": float, "min": 0.0, "max": 1.0},
}

AE_FIELDS = {
    "hidden_layers": {"type": list, "items": int, "min": 1, "default": [128, 64]},
    "embedding_dim": {"type": int, "min": 1, "default": 32},
    "train": {"type": dict, "fields": TRAIN_FIELDS, "default": {}},
    "optimizer": {"type": dict, "fields": OPTIMIZER_FIELDS, "default": {}},
}

# An empty hidden list passes here and fails in build_mlp with EmptyHiddenList
MLP_FIELDS = {
    "hidden_layers": {"type": list, "items": int, "min": 1, "default": [64, 64, 64, 64]},
    "train": {"type": dict, "fields": TRAIN_FIELDS, "default": {}},
    "optimizer": {"type": dict, "fields": OPTIMIZER_FIELDS, "default": {}},
}

PIPELINE_FIELDS = {
    "name": {"type": str, "default": "pipeline"},
    "conf_id": {"type": int, "min": 1},
    "seed": {"type": int, "default": DEFAULT_SEED},
    "train_fraction": {"type": float, "min": 0.0, "max": 1.0, "default": DEFAULT_TRAIN_FRACTION},
    "binarize": {"type": bool, "default": DEFAULT_BINARIZE},
    "ae": {"type": dict, "fields": AE_FIELDS, "default": {}},
    "mlp": {"type": dict, "fields": MLP_FIELDS, "default": {}},
}


def _check_type(value: Any, expected: type, where: str) -> Any:
    # bool is an int subclass; never accept it for numeric fields
    if expected in (int, float) and isinstance(value, bool):
        raise ConfigError(f"Invalid type for {where}: expected {expected.__name__}", field=where)
    if expected is float and isinstance(value, int):
        return float(value)
    if not isinstance(value, expected):
        raise ConfigError(f"Invalid type for {where}: expected {expected.__name__}", field=where)
    return value


def _check_range(value: Any, rules: dict, where: str) -> None:
    if "min" in rules and value < rules["min"]:
        raise ConfigError(f"{where} must be >= {rules['min']}", field=where, value=value)
    if "max" in rules and value > rules["max"]:
        raise ConfigError(f"{where} must be <= {rules['max']}", field=where, value=value)


def validate_value(key: str, value: Any, rules: dict, where: str = "") -> Any:
    """Validate one value against its rule and return the normalized value."""
    where = f"{where}.{key}" if where else key
    value = _check_type(value, rules["type"], where)

    if rules["type"] in (int, float):
        _check_range(value, rules, where)
    elif rules["type"] is list and "items" in rules:
        value = [_check_type(v, rules["items"], f"{where}[{i}]") for i, v in enumerate(value)]
        for i, v in enumerate(value):
            _check_range(v, rules, f"{where}[{i}]")
    elif rules["type"] is dict and "fields" in rules:
        value = resolve(value, rules["fields"], where)

    if "allowed" in rules and value not in rules["allowed"]:
        raise ConfigError(f"{where} must be one of: {rules['allowed']}", field=where, value=value)
    return value


def resolve(data: Optional[dict], rules: Dict[str, dict], where: str = "") -> dict:
    """
    Apply a field-rule table to ``data``.

    Returns a new dict holding every validated key plus the defaults for
    missing keys. Keys without a default are left out when missing.
    """
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be an object", field=where or None)
    unknown = sorted(set(data) - set(rules))
    if unknown:
        raise ConfigError(f"Unknown configuration key: {unknown[0]}", field=where or None, keys=unknown)

    resolved = {}
    for key, rule in rules.items():
        if key in data:
            resolved[key] = validate_value(key, data[key], rule, where)
        elif rule.get("required"):
            raise ConfigError(f"Missing required key: {key}", field=f"{where}.{key}" if where else key)
        elif "default" in rule:
            default = copy.deepcopy(rule["default"])
            resolved[key] = validate_value(key, default, rule, where)
    return resolved


def load_json(path: Union[str, Path]) -> dict:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError("Config file not found", file=str(path)) from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON: {e.msg}", file=str(path), line=e.lineno) from None


# ============================================
# Model configs
# ============================================

def ae_config_from_dict(data: Optional[dict], seed: int = DEFAULT_SEED, where: str = "ae") -> AEConfig:
    resolved = resolve(data, AE_FIELDS, where)
    return AEConfig(
        hidden_layers=resolved["hidden_layers"],
        embedding_dim=resolved["embedding_dim"],
        train=TrainConfig(seed=seed, **resolved["train"]),
        optimizer=resolved["optimizer"],
    )


def mlp_config_from_dict(data: Optional[dict], seed: int = DEFAULT_SEED, where: str = "mlp") -> MLPConfig:
    resolved = resolve(data, MLP_FIELDS, where)
    return MLPConfig(
        hidden_layers=resolved["hidden_layers"],
        train=TrainConfig(seed=seed, **resolved["train"]),
        optimizer=resolved["optimizer"],
    )


def standard_mlp(seed: int = DEFAULT_SEED) -> MLPConfig:
    """The fixed downstream MLP used to score AE candidates."""
    return mlp_config_from_dict(STANDARD_MLP, seed=seed, where="standard_mlp")


@dataclass
class PipelineConfig:
    """Everything ``train`` needs besides the data."""
    name: str
    seed: int
    train_fraction: float
    binarize: bool
    ae: AEConfig
    mlp: MLPConfig
    conf_id: Optional[int] = None
    resolved: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Optional[dict], seed: Optional[int] = None) -> "PipelineConfig":
        """``seed`` (from the command line) overrides the file's seed."""
        resolved = resolve(data, PIPELINE_FIELDS)
        if seed is not None:
            resolved["seed"] = int(seed)
        if not 0.0 < resolved["train_fraction"] < 1.0:
            raise ConfigError("train_fraction must be strictly between 0 and 1",
                              train_fraction=resolved["train_fraction"])
        s = resolved["seed"]
        return cls(
            name=resolved["name"],
            seed=s,
            train_fraction=resolved["train_fraction"],
            binarize=resolved["binarize"],
            ae=ae_config_from_dict(resolved["ae"], seed=s),
            mlp=mlp_config_from_dict(resolved["mlp"], seed=s),
            conf_id=resolved.get("conf_id"),
            resolved=resolved,
        )

    @classmethod
    def load(cls, path: Union[str, Path], seed: Optional[int] = None) -> "PipelineConfig":
        return cls.from_dict(load_json(path), seed=seed)

    @classmethod
    def best(cls, seed: Optional[int] = None) -> "PipelineConfig":
        """The best end-to-end configuration (Conf. 40)."""
        data = dict(BEST_E2E)
        data.setdefault("name", "best_e2e")
        return cls.from_dict(data, seed=seed)

    def to_dict(self) -> dict:
        return copy.deepcopy(self.resolved)
