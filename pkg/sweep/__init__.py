# sweep/__init__.py
from .plan import Pairing, SweepStage, PlannedRow, SweepPlan
from .harness import (
    RESULT_COLUMNS,
    SweepRow,
    run_row,
    run_sweep,
    auc_within,
    stage_filter,
    write_results_csv,
)

__all__ = [
    'Pairing',
    'SweepStage',
    'PlannedRow',
    'SweepPlan',
    'RESULT_COLUMNS',
    'SweepRow',
    'run_row',
    'run_sweep',
    'auc_within',
    'stage_filter',
    'write_results_csv',
]
