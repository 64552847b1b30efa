# tests/conftest.py
"""Shared fixtures: fixture paths, small synthetic corpora and split matrices."""

from pathlib import Path

import numpy as np
import pytest

from features import build_vocabulary, split_train_validation, vectorize
from ingest import load_corpus
from synth import GeneratorSpec, generate_corpus

FIXTURES = Path(__file__).parent / "fixtures"
MANIFEST_FIXTURES = FIXTURES / "manifests"


@pytest.fixture
def manifest_fixtures():
    return sorted(MANIFEST_FIXTURES.glob("*.xml"))


@pytest.fixture
def small_spec():
    """40 apps over 16 keys, 4 of them informative."""
    return GeneratorSpec.contrastive(n_mal=20, n_ben=20, vocab_size=16, n_informative=4,
                                     gap=0.6, base_rate=0.15, seed=7)


@pytest.fixture
def small_corpus(tmp_path, small_spec):
    return generate_corpus(small_spec, tmp_path / "corpus")


@pytest.fixture
def small_matrix(small_corpus):
    corpus = load_corpus(small_corpus.manifest_dir, small_corpus.labels_file)
    matrix = vectorize(corpus, build_vocabulary(corpus), binarize=True)
    return split_train_validation(matrix, 0.7, seed=42)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
