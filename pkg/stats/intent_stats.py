# stats/intent_stats.py
"""
Per-class intent frequency tables and the normalized class-contrast statistic.

    norm_diff(I_x) = 2 * (N_mal(I_x) - N_ben(I_x)) / (N_mal(I_x) + N_ben(I_x))

The value is bounded in [-2, 2]: +2 when the intent only appears in malware,
-2 when it only appears in benign apps, 0 when both counts are equal.
"""

import csv
import logging
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from config import REPORT_FLOAT_FORMAT
from errors import BothZero, ConfigError, MissingClass
from features import FeatureMatrix
from ingest import Corpus, IntentKey, Label

logger = logging.getLogger("STATS")

REPORT_HEADER = ("kind", "name", "count_mal", "count_ben", "norm_diff", "rank")


class RankBy(Enum):
    COUNT_MAL = "count_mal"
    COUNT_BEN = "count_ben"
    NORM_DIFF_MAL = "norm_diff"


@dataclass(frozen=True)
class IntentStats:
    """
    Class counts for one intent.

    ``norm_diff`` is None only when both counts are zero. Note that the
    published top-10 contrast table labels this value "Count".
    """
    key: IntentKey
    count_mal: int
    count_ben: int
    norm_diff: Optional[float] = None
    rank: Optional[int] = None

    def value(self, rank_by: RankBy) -> Optional[float]:
        if rank_by is RankBy.COUNT_MAL:
            return float(self.count_mal)
        if rank_by is RankBy.COUNT_BEN:
            return float(self.count_ben)
        return self.norm_diff

    def to_dict(self) -> dict:
        return {
            "kind": self.key.kind.value,
            "name": self.key.name,
            "count_mal": self.count_mal,
            "count_ben": self.count_ben,
            "norm_diff": self.norm_diff,
            "rank": self.rank,
        }


def normalized_difference(count_mal: int, count_ben: int) -> float:
    """Exactly 2(a - b)/(a + b). Raises BothZero when a + b == 0."""
    if count_mal < 0 or count_ben < 0:
        raise ConfigError("Counts must be non-negative", count_mal=count_mal, count_ben=count_ben)
    total = count_mal + count_ben
    if total == 0:
        raise BothZero("Normalized difference undefined when both counts are zero")
    return 2 * (count_mal - count_ben) / total


def _make_stats(key: IntentKey, count_mal: int, count_ben: int) -> IntentStats:
    try:
        nd = normalized_difference(count_mal, count_ben)
    except BothZero:
        nd = None
    return IntentStats(key=key, count_mal=int(count_mal), count_ben=int(count_ben), norm_diff=nd)


def class_counts(corpus: Corpus) -> List[IntentStats]:
    """Sum of per-app occurrence counts per key and class, sorted by (kind, name)."""
    counts = corpus.label_counts
    for label in (Label.MALICIOUS, Label.BENIGN):
        if counts[label] == 0:
            raise MissingClass(f"Corpus has no '{label.value}' samples")

    mal: Counter = Counter()
    ben: Counter = Counter()
    for sample in corpus:
        if sample.label is Label.MALICIOUS:
            mal.update(sample.intents)
        elif sample.label is Label.BENIGN:
            ben.update(sample.intents)

    keys = sorted(set(mal) | set(ben), key=lambda k: k.sort_key)
    return [_make_stats(k, mal.get(k, 0), ben.get(k, 0)) for k in keys]


def class_counts_from_matrix(matrix: FeatureMatrix) -> List[IntentStats]:
    """Per-class column sums of a feature matrix; keys with both sums zero are skipped."""
    labels = np.array([lab.value for lab in matrix.labels])
    mal_rows = labels == Label.MALICIOUS.value
    ben_rows = labels == Label.BENIGN.value
    if not mal_rows.any() or not ben_rows.any():
        raise MissingClass("Feature matrix needs both malicious and benign rows")

    mal = matrix.values[mal_rows].sum(axis=0)
    ben = matrix.values[ben_rows].sum(axis=0)
    out = []
    for j, key in enumerate(matrix.keys):
        a, b = int(round(mal[j])), int(round(ben[j]))
        if a + b == 0:
            continue
        out.append(_make_stats(key, a, b))
    return out


def top_k(stats: List[IntentStats], rank_by: RankBy, k: int) -> List[IntentStats]:
    """
    Stable descending sort with (kind, name) tie order and competition ranks
    (equal values share a rank; the next distinct value skips ahead).
    """
    if k < 1:
        raise ConfigError("k must be >= 1", k=k)

    eligible = [s for s in stats if s.value(rank_by) is not None]
    ordered = sorted(eligible, key=lambda s: (-s.value(rank_by), s.key.sort_key))

    ranked = []
    prev_value = None
    rank = 0
    for position, s in enumerate(ordered, start=1):
        value = s.value(rank_by)
        if value != prev_value:
            rank = position
            prev_value = value
        ranked.append(replace(s, rank=rank))
    return ranked[:k]


def write_stats_csv(stats: List[IntentStats], path: Union[str, Path]) -> None:
    """Write ``kind,name,count_mal,count_ben,norm_diff,rank``."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for s in stats:
            writer.writerow([
                s.key.kind.value,
                s.key.name,
                s.count_mal,
                s.count_ben,
                "" if s.norm_diff is None else REPORT_FLOAT_FORMAT.format(s.norm_diff),
                "" if s.rank is None else s.rank,
            ])
    logger.info(f"Wrote {len(stats)} rows to {path}")
