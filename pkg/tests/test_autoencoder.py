# tests/test_autoencoder.py
import json
from dataclasses import replace

import numpy as np
import pytest

from autoencoder import AEConfig, build_sae, decode, encode, train_ae
from errors import ConfigError, ConstraintViolation, ShapeMismatch
from features import FeatureMatrix, Split
from ingest import IntentKey, IntentKind, Label
from nn import Activation, Loss, TrainConfig


def _config(**train):
    return AEConfig(hidden_layers=[8, 4], embedding_dim=2,
                    train=TrainConfig(**{"epochs": 5, "batch_size": 8, "seed": 1, **train}),
                    optimizer={"kind": "rmsprop"})


def test_symmetric_layout():
    net = build_sae(16, _config())
    assert net.dims == [16, 8, 4, 2, 4, 8, 16]
    assert [layer.activation for layer in net.layers] == [
        Activation.RELU, Activation.RELU, Activation.LINEAR,
        Activation.RELU, Activation.RELU, Activation.SIGMOID,
    ]
    assert net.meta["kind"] == "autoencoder"
    assert net.meta["encoder_layer_count"] == 3


def test_single_layer_encoder():
    net = build_sae(10, AEConfig(hidden_layers=[], embedding_dim=4))
    assert net.dims == [10, 4, 10]


def test_widening_encoder_rejected():
    with pytest.raises(ConstraintViolation):
        build_sae(16, AEConfig(hidden_layers=[32], embedding_dim=8))
    with pytest.raises(ConstraintViolation):
        build_sae(16, AEConfig(hidden_layers=[8], embedding_dim=12))


def test_loss_forced_to_mse():
    config = AEConfig(train=TrainConfig(loss=Loss.BINARY_CROSS_ENTROPY))
    assert config.train.loss is Loss.MSE


def test_with_seed_changes_only_seed():
    config = _config()
    reseeded = config.with_seed(99)
    assert reseeded.train.seed == 99
    assert config.train.seed == 1
    assert reseeded.hidden_layers == config.hidden_layers


def test_train_and_encode(small_matrix):
    config = _config(epochs=10)
    net = build_sae(small_matrix.n_features, config)
    net, history = train_ae(net, small_matrix, config)
    assert history.epochs_completed == 10
    assert net.meta["val_loss"] == history.final_val_loss

    embeddings = encode(net, small_matrix)
    assert embeddings.values.shape == (small_matrix.n_rows, 2)
    assert embeddings.rows == small_matrix.rows
    assert embeddings.split == small_matrix.split
    assert embeddings.source_config == config.fingerprint


def test_encode_matches_encoder_layers(small_matrix):
    net = build_sae(small_matrix.n_features, _config())
    expected = small_matrix.values
    for layer in net.layers[:3]:
        expected = layer.forward(expected)
    np.testing.assert_array_equal(encode(net, small_matrix).values, expected)
    np.testing.assert_array_equal(decode(net, expected), net.predict(small_matrix.values))


def test_training_is_deterministic(small_matrix):
    outputs = []
    for _ in range(2):
        config = _config(epochs=3)
        net, _ = train_ae(build_sae(small_matrix.n_features, config), small_matrix, config)
        outputs.append(json.dumps(net.to_dict(), sort_keys=True))
    assert outputs[0] == outputs[1]


def test_needs_split_matrix(small_matrix):
    unsplit = replace(small_matrix, split=[Split.UNASSIGNED] * small_matrix.n_rows)
    config = _config()
    with pytest.raises(ConfigError):
        train_ae(build_sae(unsplit.n_features, config), unsplit, config)


def test_width_mismatch(small_matrix):
    config = AEConfig(hidden_layers=[4], embedding_dim=2)
    net = build_sae(small_matrix.n_features + 1, config)
    with pytest.raises(ShapeMismatch):
        encode(net, small_matrix)
    with pytest.raises(ShapeMismatch):
        train_ae(net, small_matrix, config)


def test_embedding_csv(tmp_path, small_matrix):
    embeddings = encode(build_sae(small_matrix.n_features, _config()), small_matrix)
    embeddings.to_csv(tmp_path / "embeddings.csv")
    lines = (tmp_path / "embeddings.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "app_id,e0,e1"
    assert len(lines) == small_matrix.n_rows + 1


# ============================================
# Edge cases
# ============================================

def _matrix(values):
    n, width = values.shape
    return FeatureMatrix(
        rows=[f"app{i:03d}" for i in range(n)],
        labels=[Label.MALICIOUS if i % 4 < 2 else Label.BENIGN for i in range(n)],
        values=values,
        keys=[IntentKey(IntentKind.ACTION, f"K{j:02d}") for j in range(width)],
        split=[Split.TRAIN if i % 2 == 0 else Split.VALIDATION for i in range(n)],
    )


def _rank4_matrix(n=160, block=4, seed=11):
    """Four independent bits, each copied across a block of columns."""
    bits = np.random.default_rng(seed).integers(0, 2, size=(n, 4)).astype(np.float64)
    return _matrix(np.repeat(bits, block, axis=1))


def _fit_bottleneck(matrix, embedding_dim, epochs=400):
    config = AEConfig(hidden_layers=[], embedding_dim=embedding_dim,
                      train=TrainConfig(epochs=epochs, batch_size=16, seed=5, log_every=0),
                      optimizer={"kind": "rmsprop", "learning_rate": 0.01})
    return train_ae(build_sae(matrix.n_features, config), matrix, config)


def test_rank4_data_reconstructs_better_with_embedding_4_than_1():
    matrix = _rank4_matrix()
    _, wide = _fit_bottleneck(matrix, 4)
    _, narrow = _fit_bottleneck(matrix, 1)
    assert wide.final_val_loss < narrow.final_val_loss


def test_encode_then_decode_is_bounded_by_reconstruction_loss():
    matrix = _rank4_matrix()
    net, history = _fit_bottleneck(matrix, 4)
    x_val, _ = matrix.view(Split.VALIDATION)
    embeddings = encode(net, x_val)
    assert embeddings.values.shape == (len(x_val), 4)
    recon = decode(net, embeddings.values)
    assert recon.shape == x_val.shape
    np.testing.assert_allclose(np.mean((recon - x_val) ** 2), history.final_val_loss, rtol=1e-12)
    assert history.final_val_loss < 0.05


def test_all_zero_input_drives_reconstruction_loss_towards_zero():
    matrix = _matrix(np.zeros((40, 8)))
    _, history = _fit_bottleneck(matrix, 2)
    assert history.final_val_loss < history.val_loss[0]
    assert history.final_val_loss < 1e-3


def test_zero_rows_encode_to_the_embedding_bias():
    net = build_sae(8, AEConfig(hidden_layers=[], embedding_dim=2))
    net.layers[0].bias[:] = [0.25, -1.5]
    embeddings = encode(net, np.zeros((3, 8)))
    np.testing.assert_array_equal(embeddings.values, np.tile([0.25, -1.5], (3, 1)))
