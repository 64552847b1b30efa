# sweep/harness.py
"""
Sweep execution: AE -> encode -> MLP -> evaluate for every planned row.

Rows are independent jobs. With workers > 1 they run in a process pool;
results are merged by conf id so the output never depends on scheduling.
"""

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

from autoencoder import build_sae, encode, train_ae
from classifier import build_mlp, predict, train_mlp
from config import REPORT_FLOAT_FORMAT, STAGE_AUC_DELTA
from errors import ConfigError, IntentSecError
from evaluation import ThresholdPolicy, evaluate
from features import FeatureMatrix, Split
from .plan import PlannedRow, SweepPlan

logger = logging.getLogger("SWEEP")

# (field, report heading)
RESULT_COLUMNS = [
    ("conf_id", "Conf. ID"),
    ("stage", "Stage"),
    ("ae_config", "AE Configuration"),
    ("ae_val_loss", "AE Val Loss"),
    ("mlp_config", "MLP Hidden Layer Size"),
    ("mlp_auc", "MLP AUC"),
    ("accuracy_05", "Accuracy (Th=0.5)"),
    ("fpr_05", "FPR (Th=0.5)"),
    ("best_accuracy", "Best Accuracy"),
    ("fpr_best_accuracy", "FPR @ Best Accuracy"),
    ("accuracy_best_f1", "Accuracy @ Best F1"),
    ("fpr_best_f1", "FPR @ Best F1"),
    ("seed", "Seed"),
    ("wall_time", "wall_time"),
    ("error", "error"),
]


@dataclass
class SweepRow:
    conf_id: int
    stage: str
    ae_config: str
    mlp_config: str
    seed: int
    ae_val_loss: Optional[float] = None
    mlp_auc: Optional[float] = None
    accuracy_05: Optional[float] = None
    fpr_05: Optional[float] = None
    best_accuracy: Optional[float] = None
    fpr_best_accuracy: Optional[float] = None
    accuracy_best_f1: Optional[float] = None
    fpr_best_f1: Optional[float] = None
    wall_time: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and self.mlp_auc is not None

    def metrics(self) -> Tuple:
        """Every reported number except wall time."""
        return (self.ae_val_loss, self.mlp_auc, self.accuracy_05, self.fpr_05, self.best_accuracy,
                self.fpr_best_accuracy, self.accuracy_best_f1, self.fpr_best_f1)

    def to_dict(self) -> dict:
        return asdict(self)


def run_row(planned: PlannedRow, features: FeatureMatrix, runs_dir: Optional[str] = None) -> SweepRow:
    """Train and evaluate one configuration. Failures are recorded in the row."""
    row = SweepRow(conf_id=planned.conf_id, stage=planned.stage, ae_config=planned.ae.summary(),
                   mlp_config=planned.mlp.summary(), seed=planned.seed)
    started = time.perf_counter()
    try:
        ae = build_sae(features.n_features, planned.ae)
        ae, ae_history = train_ae(ae, features, planned.ae)
        row.ae_val_loss = ae_history.final_val_loss

        embeddings = encode(ae, features)
        mlp = build_mlp(embeddings.embedding_dim, planned.mlp)
        mlp, mlp_history = train_mlp(mlp, embeddings, planned.mlp)

        scores = predict(mlp, embeddings)
        val_scores = scores.subset(features.mask(Split.VALIDATION))
        report, curve = evaluate(val_scores, meta={"conf_id": planned.conf_id, "stage": planned.stage})

        row.mlp_auc = report.auc
        row.accuracy_05 = report[ThresholdPolicy.FIXED_05].accuracy
        row.fpr_05 = report[ThresholdPolicy.FIXED_05].fpr
        row.best_accuracy = report[ThresholdPolicy.BEST_ACCURACY].accuracy
        row.fpr_best_accuracy = report[ThresholdPolicy.BEST_ACCURACY].fpr
        row.accuracy_best_f1 = report[ThresholdPolicy.BEST_F1].accuracy
        row.fpr_best_f1 = report[ThresholdPolicy.BEST_F1].fpr

        if runs_dir:
            out = Path(runs_dir) / str(planned.conf_id)
            out.mkdir(parents=True, exist_ok=True)
            ae.save(out / "ae.json")
            mlp.save(out / "mlp.json")
            ae_history.to_csv(out / "history_ae.csv")
            mlp_history.to_csv(out / "history_mlp.csv")
            val_scores.to_csv(out / "validation_scores.csv")
            curve.to_csv(out / "roc.csv")
            report.save(out / "report.json")
    except IntentSecError as e:
        row.error = f"{e.code}: {e}"
        logger.warning(f"Conf {planned.conf_id} failed: {row.error}")
    except Exception as e:
        row.error = f"{type(e).__name__}: {e}"
        logger.exception(f"Conf {planned.conf_id} failed unexpectedly: {row.error}")
    row.wall_time = time.perf_counter() - started
    return row


def _run_job(job: Tuple[PlannedRow, FeatureMatrix, Optional[str]]) -> SweepRow:
    planned, features, runs_dir = job
    return run_row(planned, features, runs_dir)


def run_sweep(
    plan: Union[SweepPlan, Sequence[PlannedRow]],
    features: FeatureMatrix,
    seed: Optional[int] = None,
    workers: int = 1,
    runs_dir: Optional[Union[str, Path]] = None,
) -> List[SweepRow]:
    """
    Run every planned row and return SweepRows ordered by conf id.

    ``plan`` may also be a pre-selected list of PlannedRow (see
    SweepPlan.only); ``seed`` then is ignored.
    """
    if not features.is_split:
        raise ConfigError("Feature matrix must be split-assigned before a sweep")
    planned = plan.rows(seed) if isinstance(plan, SweepPlan) else list(plan)
    if not planned:
        raise ConfigError("Nothing to run")
    ids = [p.conf_id for p in planned]
    if len(set(ids)) != len(ids):
        raise ConfigError("Duplicate conf ids in plan", conf_ids=ids)

    runs = str(runs_dir) if runs_dir else None
    jobs = [(p, features, runs) for p in planned]
    logger.info(f"Running {len(jobs)} configuration(s) with {max(1, workers)} worker(s)")

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_job, jobs))
    else:
        rows = []
        for job in jobs:
            rows.append(_run_job(job))
            r = rows[-1]
            if r.ok:
                logger.info(f"Conf {r.conf_id} [{r.stage}] AE {r.ae_config} MLP {r.mlp_config}: "
                            f"AUC={r.mlp_auc:.3f} acc={r.accuracy_05:.3f} ({r.wall_time:.1f}s)")

    rows.sort(key=lambda r: r.conf_id)
    failed = sum(1 for r in rows if not r.ok)
    if failed:
        logger.warning(f"{failed} of {len(rows)} configuration(s) failed")
    return rows


def auc_within(delta: float) -> Callable[[SweepRow, float], bool]:
    """Predicate: AUC no more than ``delta`` below the stage best."""
    if delta < 0:
        raise ConfigError("delta must be >= 0", delta=delta)

    def criterion(row: SweepRow, best_auc: float) -> bool:
        return row.mlp_auc >= best_auc - delta

    criterion.description = f"MLP AUC within {delta} of stage best"
    return criterion


def stage_filter(
    rows: Sequence[SweepRow],
    delta: float = STAGE_AUC_DELTA,
    criterion: Optional[Callable[[SweepRow, float], bool]] = None,
    stage: Optional[str] = None,
) -> List[SweepRow]:
    """
    Rows surviving the elimination criterion. Pure selection: nothing is
    retrained. Failed rows never survive.
    """
    candidates = [r for r in rows if r.ok and (stage is None or r.stage == stage)]
    if not candidates:
        return []
    criterion = criterion or auc_within(delta)
    best = max(r.mlp_auc for r in candidates)
    survivors = [r for r in candidates if criterion(r, best)]
    logger.info(f"{len(survivors)}/{len(candidates)} configuration(s) survive "
                f"({getattr(criterion, 'description', 'custom criterion')})")
    return survivors


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if math.isnan(value) else REPORT_FLOAT_FORMAT.format(value)
    return str(value)


def write_results_csv(rows: Sequence[SweepRow], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([title for _, title in RESULT_COLUMNS])
        for row in rows:
            data = row.to_dict()
            writer.writerow([_cell(data[key]) for key, _ in RESULT_COLUMNS])
