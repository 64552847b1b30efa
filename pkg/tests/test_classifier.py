# tests/test_classifier.py
import numpy as np
import pytest

from autoencoder import AEConfig, EmbeddingMatrix, build_sae, encode
from classifier import MLPConfig, ScoreVector, build_mlp, predict, train_mlp
from config import BCE_EPSILON
from errors import ConfigError, EmptyHiddenList, ShapeMismatch
from evaluation import roc_auc
from features import Split
from ingest import Label
from nn import Activation, Loss, TrainConfig


def _config(epochs=5):
    return MLPConfig(hidden_layers=[6, 6], train=TrainConfig(epochs=epochs, batch_size=8, seed=2),
                     optimizer={"kind": "rmsprop"})


@pytest.fixture
def embeddings(small_matrix):
    return encode(build_sae(small_matrix.n_features, AEConfig(hidden_layers=[8], embedding_dim=4)), small_matrix)


def test_layout():
    net = build_mlp(4, MLPConfig(hidden_layers=[64, 64, 64, 64]))
    assert net.dims == [4, 64, 64, 64, 64, 1]
    assert [l.activation for l in net.layers] == [Activation.RELU] * 4 + [Activation.SIGMOID]
    assert net.meta["kind"] == "mlp"


def test_empty_hidden_list():
    with pytest.raises(EmptyHiddenList):
        build_mlp(4, MLPConfig(hidden_layers=[]))


def test_loss_forced_to_bce():
    assert MLPConfig(train=TrainConfig(loss=Loss.MSE)).train.loss is Loss.BINARY_CROSS_ENTROPY


def test_scores_in_unit_interval(embeddings):
    net, history = train_mlp(build_mlp(4, _config()), embeddings, _config())
    scores = predict(net, embeddings)
    assert len(scores) == len(embeddings.rows)
    assert np.all((scores.scores > 0.0) & (scores.scores < 1.0))
    assert scores.labels == embeddings.labels
    assert len(history.val_acc) == 5


def test_scores_match_forward_oracle(embeddings):
    net = build_mlp(4, _config())
    w = net.parameters()
    out = embeddings.values
    for i in range(0, len(w), 2):
        z = out @ w[i].T + w[i + 1]
        out = np.maximum(z, 0.0) if i < len(w) - 2 else 1.0 / (1.0 + np.exp(-z))
    np.testing.assert_allclose(predict(net, embeddings).scores, out.reshape(-1), rtol=0, atol=1e-12)


def test_training_needs_labeled_rows(embeddings):
    labels = [Label.UNLABELED] * len(embeddings.rows)
    with pytest.raises(ConfigError):
        train_mlp(build_mlp(4, _config()), embeddings, _config(), labels=labels)


def test_training_needs_train_rows(embeddings):
    split = [Split.VALIDATION] * len(embeddings.rows)
    with pytest.raises(ConfigError):
        train_mlp(build_mlp(4, _config()), embeddings, _config(), split=split)


def test_width_mismatch(embeddings):
    with pytest.raises(ShapeMismatch):
        predict(build_mlp(5, _config()), embeddings)


def test_score_vector_csv(tmp_path):
    scores = ScoreVector.from_arrays([0.9, 0.1, 0.5], [1, 0, 1])
    scores.to_csv(tmp_path / "scores.csv")
    text = (tmp_path / "scores.csv").read_text(encoding="utf-8")
    assert text.splitlines() == [
        "app_id,score,label",
        "app00000,0.900000,malicious",
        "app00001,0.100000,benign",
        "app00002,0.500000,malicious",
    ]
    loaded = ScoreVector.from_csv(tmp_path / "scores.csv")
    assert loaded.labels == scores.labels
    np.testing.assert_array_equal(loaded.scores, scores.scores)


def test_score_vector_subset():
    scores = ScoreVector.from_arrays([0.9, 0.1, 0.5], [1, 0, 1])
    part = scores.subset(np.array([False, True, True]))
    assert part.app_ids == ["app00001", "app00002"]
    np.testing.assert_array_equal(part.positives, [False, True])


def test_unlabeled_scores_write_unlabeled(tmp_path):
    emb = EmbeddingMatrix(rows=["x"], values=np.zeros((1, 4)))
    scores = predict(build_mlp(4, _config()), emb)
    scores.to_csv(tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text(encoding="utf-8").splitlines()[1].endswith(",unlabeled")


def _one_unit_net(out_weight):
    net = build_mlp(1, MLPConfig(hidden_layers=[1]))
    net.layers[0].weights[:] = 1.0
    net.layers[0].bias[:] = 0.0
    net.layers[1].weights[:] = out_weight
    net.layers[1].bias[:] = 0.0
    return net


@pytest.mark.parametrize("out_weight", [100.0, -100.0])
def test_saturated_scores_stay_strictly_inside_unit_interval(out_weight):
    emb = EmbeddingMatrix(rows=["a", "b"], values=np.array([[1.0], [5.0]]))
    scores = predict(_one_unit_net(out_weight), emb).scores
    assert np.all((scores > 0.0) & (scores < 1.0))
    expected = 1.0 - BCE_EPSILON if out_weight > 0 else BCE_EPSILON
    np.testing.assert_array_equal(scores, [expected, expected])


def test_zero_weight_network_scores_one_half(embeddings):
    net = build_mlp(4, _config())
    for p in net.parameters():
        p[...] = 0.0
    np.testing.assert_array_equal(predict(net, embeddings).scores, np.full(len(embeddings.rows), 0.5))


def _separable_embeddings(n_per_class=40, seed=5):
    rng = np.random.default_rng(seed)
    mal = rng.normal(loc=2.0, scale=0.5, size=(n_per_class, 2))
    ben = rng.normal(loc=-2.0, scale=0.5, size=(n_per_class, 2))
    labels = [Label.MALICIOUS] * n_per_class + [Label.BENIGN] * n_per_class
    split = [Split.TRAIN if i % 2 == 0 else Split.VALIDATION for i in range(2 * n_per_class)]
    return EmbeddingMatrix(rows=[f"app{i:03d}" for i in range(2 * n_per_class)],
                           values=np.vstack([mal, ben]), labels=labels, split=split)


def test_separable_embeddings_reach_high_validation_auc():
    emb = _separable_embeddings()
    config = MLPConfig(hidden_layers=[8], train=TrainConfig(epochs=200, batch_size=16, seed=4, log_every=0),
                       optimizer={"kind": "rmsprop", "learning_rate": 0.01})
    net, _ = train_mlp(build_mlp(2, config), emb, config)
    scores = predict(net, emb)
    validation = scores.subset(np.array([s is Split.VALIDATION for s in emb.split]))
    assert roc_auc(validation).auc >= 0.95
