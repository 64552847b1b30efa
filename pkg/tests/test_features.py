# tests/test_features.py
from collections import Counter

import numpy as np
import pytest

from errors import ClassTooSmall, ConfigError, EmptyCorpus, ShapeMismatch
from features import FeatureMatrix, Split, Vocabulary, build_vocabulary, split_train_validation, vectorize
from ingest import AppSample, Corpus, IntentKey, IntentKind, Label, load_corpus

MAIN = IntentKey(IntentKind.ACTION, "MAIN")
BOOT = IntentKey(IntentKind.ACTION, "BOOT_COMPLETED")
LAUNCHER = IntentKey(IntentKind.CATEGORY, "LAUNCHER")
TEXT = IntentKey(IntentKind.EXTRA, "TEXT")


def _corpus():
    return Corpus(samples=[
        AppSample("a", Label.MALICIOUS, Counter({BOOT: 3, TEXT: 1})),
        AppSample("b", Label.BENIGN, Counter({MAIN: 1, LAUNCHER: 1})),
        AppSample("c", Label.BENIGN, Counter()),
    ], fingerprint="f" * 64)


def test_vocabulary_sorted_by_kind_then_name():
    vocab = build_vocabulary(_corpus())
    assert vocab.keys == [BOOT, MAIN, LAUNCHER, TEXT]
    assert vocab.labels == ["action:BOOT_COMPLETED", "action:MAIN", "category:LAUNCHER", "extra:TEXT"]
    assert vocab.frozen_from == "f" * 64


def test_vocabulary_json_round_trip(tmp_path):
    vocab = build_vocabulary(_corpus())
    vocab.save(tmp_path / "vocab.json")
    loaded = Vocabulary.load(tmp_path / "vocab.json")
    assert loaded.keys == vocab.keys
    assert loaded.index == vocab.index


def test_empty_corpus():
    with pytest.raises(EmptyCorpus):
        build_vocabulary(Corpus())


def test_corpus_without_intents_gives_zero_columns():
    corpus = Corpus(samples=[AppSample("a", Label.BENIGN)])
    vocab = build_vocabulary(corpus)
    assert len(vocab) == 0
    assert vectorize(corpus, vocab).values.shape == (1, 0)


def test_binarized_and_count_vectors():
    corpus = _corpus()
    vocab = build_vocabulary(corpus)
    binary = vectorize(corpus, vocab, binarize=True)
    counts = vectorize(corpus, vocab, binarize=False)
    np.testing.assert_array_equal(binary.values[0], [1, 0, 0, 1])
    np.testing.assert_array_equal(counts.values[0], [3, 0, 0, 1])
    np.testing.assert_array_equal(binary.values[2], [0, 0, 0, 0])


def test_unknown_keys_are_dropped_and_counted():
    vocab = Vocabulary(keys=[MAIN])
    matrix = vectorize(_corpus(), vocab, binarize=False)
    assert matrix.n_features == 1
    assert matrix.unknown_count == 5


def test_matrix_equals_generator_emissions(small_corpus):
    corpus = load_corpus(small_corpus.manifest_dir, small_corpus.labels_file)
    vocab = Vocabulary(keys=small_corpus.keys)
    matrix = vectorize(corpus, vocab, binarize=False)
    order = [vocab.index[k] for k in small_corpus.keys]
    np.testing.assert_array_equal(matrix.values[:, order], small_corpus.emissions)
    assert matrix.rows == small_corpus.app_ids


def test_split_is_stratified_and_deterministic(small_matrix):
    again = split_train_validation(small_matrix, 0.7, seed=42)
    assert again.split == small_matrix.split
    counts = small_matrix.split_counts()
    assert counts["train"] == {"malicious": 14, "benign": 14}
    assert counts["validation"] == {"malicious": 6, "benign": 6}


def test_split_depends_on_seed(small_matrix):
    other = split_train_validation(small_matrix, 0.7, seed=43)
    assert other.split != small_matrix.split


def test_split_leaves_input_untouched():
    corpus = _corpus()
    corpus.samples.append(AppSample("d", Label.MALICIOUS, Counter({MAIN: 1})))
    matrix = vectorize(corpus, build_vocabulary(corpus))
    split = split_train_validation(matrix, 0.5, seed=1)
    assert all(s is Split.UNASSIGNED for s in matrix.split)
    assert split.is_split


def test_split_rejects_bad_fraction(small_matrix):
    for fraction in (0.0, 1.0, 1.5):
        with pytest.raises(ConfigError):
            split_train_validation(small_matrix, fraction, seed=1)


def test_split_needs_two_per_class():
    corpus = _corpus()
    matrix = vectorize(corpus, build_vocabulary(corpus))
    with pytest.raises(ClassTooSmall):
        split_train_validation(matrix, 0.7, seed=1)


def test_split_rejects_missing_class():
    corpus = Corpus(samples=[
        AppSample("b", Label.BENIGN, Counter({MAIN: 1})),
        AppSample("c", Label.BENIGN, Counter({LAUNCHER: 1})),
        AppSample("d", Label.BENIGN, Counter()),
    ], fingerprint="f" * 64)
    matrix = vectorize(corpus, build_vocabulary(corpus))
    with pytest.raises(ClassTooSmall) as info:
        split_train_validation(matrix, 0.7, seed=1)
    assert info.value.context["count"] == 0


def test_csv_round_trip(tmp_path, small_matrix):
    path = tmp_path / "features.csv"
    small_matrix.to_csv(path)
    header = path.read_text(encoding="utf-8").splitlines()[0].split(",")
    assert header[:3] == ["app_id", "label", "split"]
    assert len(header) == small_matrix.n_features + 3

    loaded = FeatureMatrix.from_csv(path)
    assert loaded.rows == small_matrix.rows
    assert loaded.labels == small_matrix.labels
    assert loaded.split == small_matrix.split
    assert loaded.keys == small_matrix.keys
    assert loaded.binarized
    np.testing.assert_array_equal(loaded.values, small_matrix.values)


def test_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,label,split\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        FeatureMatrix.from_csv(path)


def test_csv_unknown_split_value(tmp_path):
    path = tmp_path / "bad_split.csv"
    path.write_text("app_id,label,split,action:MAIN\na,benign,holdout,1\n", encoding="utf-8")
    with pytest.raises(ConfigError) as info:
        FeatureMatrix.from_csv(path)
    assert info.value.context["line"] == 2


def test_shape_checks():
    with pytest.raises(ShapeMismatch):
        FeatureMatrix(rows=["a"], labels=[Label.BENIGN, Label.BENIGN], values=np.zeros((1, 1)), keys=[MAIN])
    with pytest.raises(ShapeMismatch):
        FeatureMatrix(rows=["a"], labels=[Label.BENIGN], values=np.zeros((1, 2)), keys=[MAIN])
