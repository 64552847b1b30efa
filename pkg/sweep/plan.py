# sweep/plan.py
"""
Sweep plans: named stages of AE/MLP grids with sequential conf ids.

Plan file layout (JSON):

    {
      "name": "full_grid",
      "seed": 42,
      "conf_id_start": 1,
      "standard_mlp": {...},              # optional, defaults to config.STANDARD_MLP
      "stages": [
        {"name": "ae_single_layer", "pairing": "fixed_mlp_vary_ae",
         "ae_grid": [{...}, ...]},         # mlp_grid omitted -> standard MLP
        {"name": "ae_reseed", "pairing": "fixed_mlp_vary_ae", "seed_offset": 1,
         "ae_grid": [...]},
        {"name": "mlp_depth", "pairing": "fixed_ae_vary_mlp",
         "ae_grid": [{...}], "mlp_grid": [...]},
        {"name": "optimizer", "pairing": "explicit",
         "ae_grid": [...], "mlp_grid": [...]}  # zipped pairwise
      ]
    }
"""

import copy
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

from autoencoder import AEConfig
from classifier import MLPConfig
from config import DEFAULT_BINARIZE, DEFAULT_SEED, DEFAULT_TRAIN_FRACTION, STANDARD_MLP
from errors import ConfigError
from pipeline import (
    AE_FIELDS,
    MLP_FIELDS,
    ae_config_from_dict,
    load_json,
    mlp_config_from_dict,
    resolve,
)


class Pairing(Enum):
    FIXED_MLP_VARY_AE = "fixed_mlp_vary_ae"
    FIXED_AE_VARY_MLP = "fixed_ae_vary_mlp"
    EXPLICIT = "explicit"


STAGE_FIELDS = {
    "name": {"type": str, "required": True},
    "pairing": {"type": str, "allowed": [p.value for p in Pairing], "default": Pairing.FIXED_MLP_VARY_AE.value},
    "ae_grid": {"type": list, "required": True},
    "mlp_grid": {"type": list},
    "seed_offset": {"type": int, "default": 0},
    "note": {"type": str, "default": ""},
}

PLAN_FIELDS = {
    "name": {"type": str, "default": "sweep"},
    "seed": {"type": int, "default": DEFAULT_SEED},
    "conf_id_start": {"type": int, "min": 1, "default": 1},
    "train_fraction": {"type": float, "min": 0.0, "max": 1.0, "default": DEFAULT_TRAIN_FRACTION},
    "binarize": {"type": bool, "default": DEFAULT_BINARIZE},
    "standard_mlp": {"type": dict, "fields": MLP_FIELDS, "default": STANDARD_MLP},
    "stages": {"type": list, "required": True},
    "note": {"type": str, "default": ""},
}


@dataclass
class SweepStage:
    name: str
    pairing: Pairing
    ae_grid: List[AEConfig]
    mlp_grid: List[MLPConfig]
    seed_offset: int = 0
    note: str = ""

    def __post_init__(self):
        if not self.ae_grid or not self.mlp_grid:
            raise ConfigError("Stage grids must be non-empty", stage=self.name)
        if self.pairing is Pairing.FIXED_MLP_VARY_AE and len(self.mlp_grid) != 1:
            raise ConfigError("fixed_mlp_vary_ae takes exactly one MLP", stage=self.name, mlp_grid=len(self.mlp_grid))
        if self.pairing is Pairing.FIXED_AE_VARY_MLP and len(self.ae_grid) != 1:
            raise ConfigError("fixed_ae_vary_mlp takes exactly one AE", stage=self.name, ae_grid=len(self.ae_grid))
        if self.pairing is Pairing.EXPLICIT and len(self.ae_grid) != len(self.mlp_grid):
            raise ConfigError("explicit pairing needs grids of equal length", stage=self.name,
                              ae_grid=len(self.ae_grid), mlp_grid=len(self.mlp_grid))

    def pairs(self) -> List[Tuple[AEConfig, MLPConfig]]:
        if self.pairing is Pairing.FIXED_MLP_VARY_AE:
            return [(ae, self.mlp_grid[0]) for ae in self.ae_grid]
        if self.pairing is Pairing.FIXED_AE_VARY_MLP:
            return [(self.ae_grid[0], mlp) for mlp in self.mlp_grid]
        return list(zip(self.ae_grid, self.mlp_grid))

    def __len__(self) -> int:
        return len(self.pairs())


@dataclass
class PlannedRow:
    """One configuration to run: the pair of model configs and its seed."""
    conf_id: int
    stage: str
    ae: AEConfig
    mlp: MLPConfig
    seed: int


@dataclass
class SweepPlan:
    stages: List[SweepStage]
    name: str = "sweep"
    seed: int = DEFAULT_SEED
    conf_id_start: int = 1
    train_fraction: float = DEFAULT_TRAIN_FRACTION
    binarize: bool = DEFAULT_BINARIZE
    resolved: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.stages:
            raise ConfigError("Plan has no stages", plan=self.name)
        names = [s.name for s in self.stages]
        if len(set(names)) != len(names):
            raise ConfigError("Stage names must be unique", stages=names)

    @classmethod
    def from_grids(cls, ae_grid: List[AEConfig], mlp_grid: List[MLPConfig],
                   pairing: Pairing = Pairing.FIXED_MLP_VARY_AE, conf_id_start: int = 1,
                   seed: int = DEFAULT_SEED, name: str = "sweep") -> "SweepPlan":
        """Single-stage plan built in code."""
        stage = SweepStage(name=name, pairing=pairing, ae_grid=list(ae_grid), mlp_grid=list(mlp_grid))
        return cls(stages=[stage], name=name, seed=seed, conf_id_start=conf_id_start)

    def rows(self, seed: Optional[int] = None) -> List[PlannedRow]:
        """
        Conf ids run sequentially across stages from ``conf_id_start``.
        Every row uses the plan seed plus its stage's offset.
        """
        base = self.seed if seed is None else int(seed)
        planned = []
        conf_id = self.conf_id_start
        for stage in self.stages:
            row_seed = base + stage.seed_offset
            for ae, mlp in stage.pairs():
                planned.append(PlannedRow(conf_id=conf_id, stage=stage.name,
                                          ae=ae.with_seed(row_seed), mlp=mlp.with_seed(row_seed),
                                          seed=row_seed))
                conf_id += 1
        return planned

    def stage(self, name: str) -> SweepStage:
        for s in self.stages:
            if s.name == name:
                return s
        raise ConfigError(f"Unknown stage '{name}'", stages=[s.name for s in self.stages])

    def only(self, stage_names: List[str], seed: Optional[int] = None) -> List[PlannedRow]:
        """Rows of the named stages, keeping their original conf ids."""
        wanted = set(stage_names)
        for n in wanted:
            self.stage(n)
        return [r for r in self.rows(seed) if r.stage in wanted]

    def __len__(self) -> int:
        return sum(len(s) for s in self.stages)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepPlan":
        resolved = resolve(data, PLAN_FIELDS, "plan")
        resolved["stages"] = copy.deepcopy(resolved["stages"])
        seed = resolved["seed"]
        default_mlp = mlp_config_from_dict(resolved["standard_mlp"], seed=seed, where="plan.standard_mlp")

        stages = []
        for i, raw in enumerate(resolved["stages"]):
            where = f"plan.stages[{i}]"
            stage = resolve(raw, STAGE_FIELDS, where)
            ae_grid = [ae_config_from_dict(entry, seed=seed, where=f"{where}.ae_grid[{j}]")
                       for j, entry in enumerate(stage["ae_grid"])]
            if stage.get("mlp_grid") is None:
                mlp_grid = [default_mlp]
            else:
                mlp_grid = [mlp_config_from_dict(entry, seed=seed, where=f"{where}.mlp_grid[{j}]")
                            for j, entry in enumerate(stage["mlp_grid"])]
            stages.append(SweepStage(
                name=stage["name"],
                pairing=Pairing(stage["pairing"]),
                ae_grid=ae_grid,
                mlp_grid=mlp_grid,
                seed_offset=stage["seed_offset"],
                note=stage["note"],
            ))
            resolved["stages"][i] = {
                **stage,
                "ae_grid": [resolve(e, AE_FIELDS) for e in stage["ae_grid"]],
                "mlp_grid": ([resolve(e, MLP_FIELDS) for e in stage["mlp_grid"]]
                             if stage.get("mlp_grid") is not None else None),
            }

        return cls(
            stages=stages,
            name=resolved["name"],
            seed=seed,
            conf_id_start=resolved["conf_id_start"],
            train_fraction=resolved["train_fraction"],
            binarize=resolved["binarize"],
            resolved=resolved,
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SweepPlan":
        return cls.from_dict(load_json(path))

    def to_dict(self) -> dict:
        if self.resolved:
            return copy.deepcopy(self.resolved)
        return {
            "name": self.name,
            "seed": self.seed,
            "conf_id_start": self.conf_id_start,
            "train_fraction": self.train_fraction,
            "binarize": self.binarize,
            "stages": [{
                "name": s.name,
                "pairing": s.pairing.value,
                "seed_offset": s.seed_offset,
                "ae_grid": [c.to_dict() for c in s.ae_grid],
                "mlp_grid": [c.to_dict() for c in s.mlp_grid],
            } for s in self.stages],
        }
