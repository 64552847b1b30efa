# tests/test_sweep.py
import copy
from dataclasses import replace
from pathlib import Path

import pytest

from autoencoder import build_sae, encode, train_ae
from classifier import build_mlp, predict, train_mlp
from config import STAGE_AUC_DELTA
from errors import ConfigError
from evaluation import ThresholdPolicy, evaluate
from features import Split
from pipeline import PipelineConfig
from sweep import (
    RESULT_COLUMNS,
    Pairing,
    SweepPlan,
    SweepRow,
    auc_within,
    run_sweep,
    stage_filter,
    write_results_csv,
)
from sweep import harness

ROOT = Path(__file__).resolve().parent.parent

TINY_TRAIN = {"epochs": 3, "batch_size": 8}


def _tiny_plan(**extra):
    return {
        "name": "tiny",
        "seed": 5,
        "standard_mlp": {"hidden_layers": [4], "train": TINY_TRAIN, "optimizer": {"kind": "rmsprop"}},
        "stages": [
            {"name": "ae", "ae_grid": [
                {"hidden_layers": [8], "embedding_dim": 4, "train": TINY_TRAIN},
                {"hidden_layers": [6], "embedding_dim": 3, "train": TINY_TRAIN},
            ]},
        ],
        **extra,
    }


# ============================================
# Plans
# ============================================

@pytest.fixture(scope="module")
def full_plan():
    return SweepPlan.load(ROOT / "plans" / "full_grid.json")


def test_full_grid_has_42_rows(full_plan):
    rows = full_plan.rows()
    assert len(full_plan) == 42
    assert [r.conf_id for r in rows] == list(range(1, 43))


def test_full_grid_stage_ids(full_plan):
    ids = {}
    for row in full_plan.rows():
        ids.setdefault(row.stage, []).append(row.conf_id)
    assert ids == {
        "ae_single_layer": list(range(1, 12)),
        "ae_single_layer_reseed": [12, 13],
        "ae_two_layer": list(range(14, 20)),
        "ae_three_layer": [20, 21, 22],
        "mlp_depth": list(range(23, 38)),
        "epochs_optimizer": [38, 39, 40],
        "batch_size": [41, 42],
    }


def test_full_grid_reseed_rows(full_plan):
    rows = {r.conf_id: r for r in full_plan.rows()}
    assert rows[12].ae.summary() == rows[2].ae.summary()
    assert rows[13].ae.summary() == rows[10].ae.summary()
    assert rows[12].seed == rows[2].seed + 1
    assert rows[12].ae.train.seed == rows[12].mlp.train.seed == 43


def test_full_grid_ae_stages_use_standard_mlp(full_plan):
    for row in full_plan.rows():
        if row.stage.startswith("ae_"):
            assert row.mlp.hidden_layers == [64, 64]
            assert row.mlp.optimizer["kind"] == "adadelta"


def test_conf_40_is_best_configuration(full_plan):
    row = next(r for r in full_plan.rows() if r.conf_id == 40)
    best = PipelineConfig.best()
    assert row.ae.to_dict() == best.ae.to_dict()
    assert row.mlp.to_dict() == best.mlp.to_dict()


def test_seed_override(full_plan):
    rows = full_plan.rows(seed=100)
    assert {r.seed for r in rows} == {100, 101}


def test_only_keeps_conf_ids(full_plan):
    rows = full_plan.only(["mlp_depth", "batch_size"])
    assert [r.conf_id for r in rows] == list(range(23, 38)) + [41, 42]
    with pytest.raises(ConfigError):
        full_plan.only(["nope"])


def test_from_dict_leaves_input_untouched():
    data = _tiny_plan()
    snapshot = copy.deepcopy(data)
    plan = SweepPlan.from_dict(data)
    assert data == snapshot
    assert plan.to_dict()["stages"][0]["mlp_grid"] is None


@pytest.mark.parametrize("change", [
    lambda d: d.update(extra=1),
    lambda d: d["stages"][0].update(pairing="zip"),
    lambda d: d["stages"][0].update(mlp_grid=[{"hidden_layers": [4]}, {"hidden_layers": [8]}]),
    lambda d: d["stages"][0]["ae_grid"][0].update(depth=2),
    lambda d: d["stages"].append(copy.deepcopy(d["stages"][0])),
    lambda d: d.update(stages=[]),
])
def test_invalid_plans(change):
    data = _tiny_plan()
    change(data)
    with pytest.raises(ConfigError):
        SweepPlan.from_dict(data)


def test_from_grids(full_plan):
    ae = [r.ae for r in full_plan.rows()[:3]]
    mlp = [full_plan.rows()[0].mlp]
    plan = SweepPlan.from_grids(ae, mlp, pairing=Pairing.FIXED_MLP_VARY_AE, conf_id_start=7)
    assert [r.conf_id for r in plan.rows()] == [7, 8, 9]


# ============================================
# Stage elimination
# ============================================

def _row(conf_id, auc, stage="s", error=""):
    return SweepRow(conf_id=conf_id, stage=stage, ae_config="a", mlp_config="m", seed=42,
                    mlp_auc=None if error else auc, error=error)


def test_stage_filter_extremes():
    rows = [_row(1, 0.80), _row(2, 0.78), _row(3, 0.70), _row(4, 0.80)]
    assert [r.conf_id for r in stage_filter(rows, delta=0.0)] == [1, 4]
    assert [r.conf_id for r in stage_filter(rows, delta=1.0)] == [1, 2, 3, 4]


def test_stage_filter_published_ae_search():
    # single-layer AE AUCs in the shape of the published search: [256]->128 and [32]->32 lead
    aucs = {1: 0.745, 2: 0.781, 3: 0.752, 4: 0.739, 5: 0.760, 6: 0.748, 7: 0.741,
            8: 0.735, 9: 0.744, 10: 0.779, 11: 0.722}
    rows = [_row(i, a) for i, a in aucs.items()]
    survivors = [r.conf_id for r in stage_filter(rows, delta=0.005)]
    assert survivors == [2, 10]
    assert len(stage_filter(rows)) == len([a for a in aucs.values() if a >= 0.781 - STAGE_AUC_DELTA])


def test_stage_filter_skips_failures_and_other_stages():
    rows = [_row(1, 0.9), _row(2, 0.0, error="ShapeMismatch: x"), _row(3, 0.95, stage="other")]
    assert [r.conf_id for r in stage_filter(rows, delta=1.0, stage="s")] == [1]
    assert stage_filter([_row(5, 0.0, error="boom")]) == []


def test_custom_criterion():
    rows = [_row(1, 0.9), _row(2, 0.6)]
    kept = stage_filter(rows, criterion=lambda row, best: row.conf_id == 2)
    assert [r.conf_id for r in kept] == [2]


def test_negative_delta():
    with pytest.raises(ConfigError):
        auc_within(-0.1)


# ============================================
# Execution
# ============================================

def test_run_sweep_records_every_row(tmp_path, small_matrix):
    plan = SweepPlan.from_dict(_tiny_plan())
    rows = run_sweep(plan, small_matrix, runs_dir=tmp_path / "runs")
    assert [r.conf_id for r in rows] == [1, 2]
    assert all(r.ok for r in rows)
    for row in rows:
        assert 0.0 <= row.mlp_auc <= 1.0
        assert row.best_accuracy >= row.accuracy_05
        run = tmp_path / "runs" / str(row.conf_id)
        for name in ("ae.json", "mlp.json", "history_ae.csv", "history_mlp.csv",
                     "validation_scores.csv", "roc.csv", "report.json"):
            assert (run / name).is_file()


def test_run_sweep_is_deterministic(small_matrix):
    plan = SweepPlan.from_dict(_tiny_plan())
    first = [r.metrics() for r in run_sweep(plan, small_matrix)]
    second = [r.metrics() for r in run_sweep(plan, small_matrix)]
    assert first == second


def test_worker_pool_matches_serial(small_matrix):
    plan = SweepPlan.from_dict(_tiny_plan())
    serial = [r.metrics() for r in run_sweep(plan, small_matrix)]
    pooled = [r.metrics() for r in run_sweep(plan, small_matrix, workers=2)]
    assert serial == pooled


def test_single_row_equals_direct_composition(small_matrix):
    plan = SweepPlan.from_dict(_tiny_plan())
    planned = plan.rows()[0]
    row = run_sweep([planned], small_matrix)[0]

    ae, ae_history = train_ae(build_sae(small_matrix.n_features, planned.ae), small_matrix, planned.ae)
    embeddings = encode(ae, small_matrix)
    mlp, _ = train_mlp(build_mlp(embeddings.embedding_dim, planned.mlp), embeddings, planned.mlp)
    scores = predict(mlp, embeddings).subset(small_matrix.mask(Split.VALIDATION))
    report, _ = evaluate(scores)

    assert row.ae_val_loss == ae_history.final_val_loss
    assert row.mlp_auc == report.auc
    assert row.accuracy_05 == report[ThresholdPolicy.FIXED_05].accuracy
    assert row.fpr_best_f1 == report[ThresholdPolicy.BEST_F1].fpr


def test_failing_row_does_not_stop_sweep(small_matrix):
    data = _tiny_plan()
    # embedding wider than the hidden layer violates the encoder shape
    data["stages"][0]["ae_grid"].insert(0, {"hidden_layers": [4], "embedding_dim": 6, "train": TINY_TRAIN})
    rows = run_sweep(SweepPlan.from_dict(data), small_matrix)
    assert not rows[0].ok
    assert rows[0].error.startswith("ConstraintViolation")
    assert rows[1].ok and rows[2].ok
    assert stage_filter(rows, delta=1.0)[0].conf_id == 2


def test_unexpected_exception_is_recorded_in_its_row(small_matrix, monkeypatch):
    real_build_mlp = harness.build_mlp

    def build_mlp_failing_once(embedding_dim, config, seed=None):
        if embedding_dim == 4:
            raise ValueError("bad embedding")
        return real_build_mlp(embedding_dim, config, seed)

    monkeypatch.setattr(harness, "build_mlp", build_mlp_failing_once)
    rows = run_sweep(SweepPlan.from_dict(_tiny_plan()), small_matrix)
    assert [r.conf_id for r in rows] == [1, 2]
    assert rows[0].error == "ValueError: bad embedding"
    assert rows[0].mlp_auc is None
    assert rows[1].ok


def test_unsplit_features_rejected(small_matrix):
    unsplit = replace(small_matrix, split=[Split.UNASSIGNED] * small_matrix.n_rows)
    with pytest.raises(ConfigError):
        run_sweep(SweepPlan.from_dict(_tiny_plan()), unsplit)


def test_results_csv(tmp_path):
    rows = [_row(2, 0.75), _row(1, 0.0, error="NonFiniteGradient: loss")]
    write_results_csv(rows, tmp_path / "results.csv")
    lines = (tmp_path / "results.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].split(",")[:6] == ["Conf. ID", "Stage", "AE Configuration", "AE Val Loss",
                                       "MLP Hidden Layer Size", "MLP AUC"]
    assert len(lines[0].split(",")) == len(RESULT_COLUMNS)
    assert lines[1].startswith("2,s,a,,m,0.750000,")
    assert lines[2].endswith(",NonFiniteGradient: loss")
