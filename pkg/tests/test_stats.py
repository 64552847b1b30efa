# tests/test_stats.py
from collections import Counter

import numpy as np
import pytest

from errors import BothZero, ConfigError, MissingClass
from features import Vocabulary, vectorize
from ingest import AppSample, Corpus, IntentKey, IntentKind, Label, load_corpus
from stats import (
    IntentStats,
    RankBy,
    class_counts,
    class_counts_from_matrix,
    normalized_difference,
    top_k,
    write_stats_csv,
)


def _key(name, kind=IntentKind.ACTION):
    return IntentKey(kind, name)


# ============================================
# Normalized difference
# ============================================

def test_boundaries():
    for a in (1, 7, 5560):
        assert normalized_difference(a, 0) == 2.0
        assert normalized_difference(0, a) == -2.0
    assert normalized_difference(9, 9) == 0.0


def test_published_home_row():
    assert normalized_difference(1881, 203) == pytest.approx(1.610, abs=5e-4)


def test_antisymmetry_and_bounds(rng):
    pairs = rng.integers(0, 10_000, size=(1000, 2))
    pairs[pairs.sum(axis=1) == 0] = (1, 0)
    for a, b in pairs:
        a, b = int(a), int(b)
        value = normalized_difference(a, b)
        assert value == -normalized_difference(b, a)
        assert -2.0 <= value <= 2.0
        assert value == 2 * (a - b) / (a + b)


def test_both_zero():
    with pytest.raises(BothZero):
        normalized_difference(0, 0)


def test_negative_counts():
    with pytest.raises(ConfigError):
        normalized_difference(-1, 3)


# ============================================
# Ranking
# ============================================

def _contrast_fixture():
    """Five malware-only intents, then a HOME-like row, then weaker contrasts."""
    rows = [
        ("DATA_REMOVED", 12, 0),
        ("SIG_STR", 8, 0),
        ("BATTERY_CHANGED_ACTION", 30, 0),
        ("SMS_SENT", 3, 0),
        ("PHONE_STATE_CHANGE", 5, 0),
        ("HOME", 1881, 203),
        ("BOOT_COMPLETED", 4000, 900),
        ("MAIN", 5000, 5000),
        ("LAUNCHER", 10, 40),
    ]
    return [IntentStats(key=_key(n), count_mal=a, count_ben=b, norm_diff=normalized_difference(a, b))
            for n, a, b in rows]


def test_five_shared_first_ranks():
    ranked = top_k(_contrast_fixture(), RankBy.NORM_DIFF_MAL, 10)
    assert [s.rank for s in ranked[:6]] == [1, 1, 1, 1, 1, 6]
    # ties keep (kind, name) order
    assert [s.key.name for s in ranked[:5]] == sorted(
        ["DATA_REMOVED", "SIG_STR", "BATTERY_CHANGED_ACTION", "SMS_SENT", "PHONE_STATE_CHANGE"])
    assert ranked[5].key.name == "HOME"
    assert ranked[-1].key.name == "LAUNCHER"


def test_k_larger_than_list():
    stats = _contrast_fixture()
    assert len(top_k(stats, RankBy.COUNT_MAL, 100)) == len(stats)


def test_k_must_be_positive():
    with pytest.raises(ConfigError):
        top_k(_contrast_fixture(), RankBy.COUNT_MAL, 0)


def test_rank_by_counts():
    ranked = top_k(_contrast_fixture(), RankBy.COUNT_BEN, 3)
    assert [s.key.name for s in ranked] == ["MAIN", "BOOT_COMPLETED", "HOME"]
    assert [s.rank for s in ranked] == [1, 2, 3]


def test_undefined_contrast_is_not_ranked():
    stats = _contrast_fixture() + [IntentStats(key=_key("GHOST"), count_mal=0, count_ben=0)]
    ranked = top_k(stats, RankBy.NORM_DIFF_MAL, 100)
    assert "GHOST" not in [s.key.name for s in ranked]


def test_ordering_matches_full_sort(rng):
    stats = [IntentStats(key=_key(f"K{i:03d}", IntentKind(("action", "category", "extra")[i % 3])),
                         count_mal=int(a), count_ben=int(b))
             for i, (a, b) in enumerate(rng.integers(0, 6, size=(60, 2)))]
    ranked = top_k(stats, RankBy.COUNT_MAL, len(stats))
    expected = sorted(stats, key=lambda s: (-s.count_mal, s.key.kind.order, s.key.name))
    assert [s.key for s in ranked] == [s.key for s in expected]
    for s in ranked:
        assert s.rank == 1 + sum(1 for o in stats if o.count_mal > s.count_mal)


# ============================================
# Class counts
# ============================================

def test_class_counts_sum_occurrences():
    boot, main = _key("BOOT_COMPLETED"), _key("MAIN")
    corpus = Corpus(samples=[
        AppSample("a", Label.MALICIOUS, Counter({boot: 2, main: 1})),
        AppSample("b", Label.MALICIOUS, Counter({boot: 1})),
        AppSample("c", Label.BENIGN, Counter({main: 4})),
    ])
    stats = {s.key.name: s for s in class_counts(corpus)}
    assert (stats["BOOT_COMPLETED"].count_mal, stats["BOOT_COMPLETED"].count_ben) == (3, 0)
    assert stats["BOOT_COMPLETED"].norm_diff == 2.0
    assert (stats["MAIN"].count_mal, stats["MAIN"].count_ben) == (1, 4)


def test_class_counts_needs_both_classes():
    corpus = Corpus(samples=[AppSample("a", Label.MALICIOUS, Counter({_key("X"): 1}))])
    with pytest.raises(MissingClass):
        class_counts(corpus)


def test_class_counts_equal_generator_totals(small_corpus):
    corpus = load_corpus(small_corpus.manifest_dir, small_corpus.labels_file)
    stats = {s.key: s for s in class_counts(corpus)}
    mal = small_corpus.totals(Label.MALICIOUS)
    ben = small_corpus.totals(Label.BENIGN)
    for j, key in enumerate(small_corpus.keys):
        if mal[j] + ben[j] == 0:
            assert key not in stats
            continue
        assert (stats[key].count_mal, stats[key].count_ben) == (mal[j], ben[j])


def test_matrix_counts_agree_with_corpus_counts(small_corpus):
    corpus = load_corpus(small_corpus.manifest_dir, small_corpus.labels_file)
    matrix = vectorize(corpus, Vocabulary(keys=small_corpus.keys), binarize=False)
    from_corpus = [s.to_dict() for s in class_counts(corpus)]
    from_matrix = [s.to_dict() for s in class_counts_from_matrix(matrix)]
    assert from_matrix == from_corpus


def test_stats_csv(tmp_path):
    path = tmp_path / "stats.csv"
    write_stats_csv(top_k(_contrast_fixture(), RankBy.NORM_DIFF_MAL, 6), path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "kind,name,count_mal,count_ben,norm_diff,rank"
    assert lines[1].endswith(",2.000000,1")
    assert lines[6] == "action,HOME,1881,203,1.610365,6"
    assert len(lines) == 7
