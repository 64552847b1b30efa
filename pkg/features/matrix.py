# features/matrix.py
"""
Dense per-app feature vectors over a frozen vocabulary, with split assignment.
"""

import csv
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from errors import ClassTooSmall, ConfigError, ShapeMismatch
from ingest import Corpus, IntentKey, Label
from .vocabulary import Vocabulary

logger = logging.getLogger("FEATURES")

FIXED_COLUMNS = ("app_id", "label", "split")


class Split(Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    UNASSIGNED = ""


@dataclass
class FeatureMatrix:
    """
    n_apps x vocab_size matrix of non-negative values.

    ``keys`` are the column identities; ``unknown_count`` is the number of
    intent occurrences dropped because they were outside the vocabulary.
    """
    rows: List[str]
    labels: List[Label]
    values: np.ndarray
    keys: List[IntentKey]
    binarized: bool = True
    split: List[Split] = field(default_factory=list)
    unknown_count: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            self.values = self.values.reshape(len(self.rows), len(self.keys))
        if not self.split:
            self.split = [Split.UNASSIGNED] * len(self.rows)
        n = len(self.rows)
        if len(self.labels) != n or len(self.split) != n or self.values.shape[0] != n:
            raise ShapeMismatch("Row count, labels and split must align",
                                rows=n, labels=len(self.labels), values=self.values.shape[0])
        if self.values.shape[1] != len(self.keys):
            raise ShapeMismatch("Column count must equal vocabulary size",
                                columns=self.values.shape[1], vocab=len(self.keys))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_features(self) -> int:
        return len(self.keys)

    @property
    def targets(self) -> np.ndarray:
        """Column vector of class targets (malicious=1). Unlabeled rows are NaN."""
        return np.array(
            [[np.nan if lab.target is None else lab.target] for lab in self.labels],
            dtype=np.float64,
        ).reshape(-1, 1)

    def mask(self, split: Split) -> np.ndarray:
        return np.array([s is split for s in self.split], dtype=bool)

    def view(self, split: Split) -> Tuple[np.ndarray, np.ndarray]:
        """(values, targets) for the rows of one split."""
        m = self.mask(split)
        return self.values[m], self.targets[m]

    @property
    def is_split(self) -> bool:
        return any(s is Split.TRAIN for s in self.split) and any(s is Split.VALIDATION for s in self.split)

    def split_counts(self) -> dict:
        out = {}
        for s in (Split.TRAIN, Split.VALIDATION):
            rows = [lab for lab, sp in zip(self.labels, self.split) if sp is s]
            out[s.value] = {lab.value: rows.count(lab) for lab in (Label.MALICIOUS, Label.BENIGN)}
        return out

    # ============================================
    # CSV
    # ============================================

    def to_csv(self, path: Union[str, Path]) -> None:
        """Write ``app_id,label,split,<key labels...>`` with integer cells."""
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(list(FIXED_COLUMNS) + [k.label for k in self.keys])
            for i, app_id in enumerate(self.rows):
                cells = [str(int(round(v))) for v in self.values[i]]
                writer.writerow([app_id, self.labels[i].value, self.split[i].value] + cells)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "FeatureMatrix":
        path = Path(path)
        if not path.is_file():
            raise ConfigError("Feature file not found", file=str(path))
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or tuple(header[:3]) != FIXED_COLUMNS:
                raise ConfigError(f"Feature file header must start with {','.join(FIXED_COLUMNS)}",
                                  file=str(path), line=1)
            keys = [IntentKey.from_label(h) for h in header[3:]]
            rows, labels, splits, values = [], [], [], []
            for line_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise ShapeMismatch("Row width differs from header", file=str(path), line=line_no)
                rows.append(row[0])
                labels.append(Label.parse(row[1], allow_unlabeled=True, file=str(path), line=line_no))
                try:
                    splits.append(Split(row[2]))
                except ValueError:
                    raise ConfigError(f"Unknown split value '{row[2]}'", file=str(path), line=line_no,
                                      allowed=[s.value for s in Split]) from None
                values.append([float(v) for v in row[3:]])
        arr = np.array(values, dtype=np.float64).reshape(len(rows), len(keys))
        binarized = bool(np.all((arr == 0) | (arr == 1)))
        return cls(rows=rows, labels=labels, values=arr, keys=keys, binarized=binarized, split=splits)


def vectorize(corpus: Corpus, vocab: Vocabulary, binarize: bool = True) -> FeatureMatrix:
    """Cell (i, j) is the count of vocabulary key j in app i, clipped to 1 when binarize."""
    values = np.zeros((len(corpus), len(vocab)), dtype=np.float64)
    unknown = 0
    for i, sample in enumerate(corpus):
        for key, count in sample.intents.items():
            j = vocab.index.get(key)
            if j is None:
                unknown += count
                continue
            values[i, j] = min(count, 1) if binarize else count

    if unknown:
        logger.info(f"{unknown} intent occurrence(s) outside the vocabulary were dropped")

    return FeatureMatrix(
        rows=corpus.app_ids(),
        labels=[s.label for s in corpus],
        values=values,
        keys=list(vocab.keys),
        binarized=binarize,
        unknown_count=unknown,
    )


def split_train_validation(matrix: FeatureMatrix, train_fraction: float, seed: int) -> FeatureMatrix:
    """
    Stratified split: each class is shuffled with its own seeded generator
    and cut at ``train_fraction``.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError("train_fraction must be in (0, 1)", train_fraction=train_fraction)

    split = [Split.UNASSIGNED] * matrix.n_rows
    # unlabeled rows stay unassigned
    for order, label in enumerate((Label.MALICIOUS, Label.BENIGN)):
        idx = np.array([i for i, lab in enumerate(matrix.labels) if lab is label], dtype=np.int64)
        if len(idx) < 2:
            raise ClassTooSmall(f"Class '{label.value}' has fewer than 2 samples", count=len(idx))
        rng = np.random.default_rng([seed, order])
        shuffled = idx[rng.permutation(len(idx))]
        n_train = int(round(len(idx) * train_fraction))
        n_train = min(max(n_train, 1), len(idx) - 1)
        for i in shuffled[:n_train]:
            split[i] = Split.TRAIN
        for i in shuffled[n_train:]:
            split[i] = Split.VALIDATION

    result = replace(matrix, values=matrix.values.copy(), split=split)
    logger.info(f"Split {matrix.n_rows} rows at {train_fraction}: {result.split_counts()}")
    return result
