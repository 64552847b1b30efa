# ingest/corpus.py
"""
Labeled application samples and the corpus container.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from errors import UnknownLabelValue
from .intents import IntentKey


class Label(Enum):
    """Ground-truth class of an application. Malicious is the positive class."""
    MALICIOUS = "malicious"
    BENIGN = "benign"
    UNLABELED = "unlabeled"

    @classmethod
    def parse(cls, value: str, allow_unlabeled: bool = False, **context) -> "Label":
        text = (value or "").strip().lower()
        try:
            label = cls(text)
        except ValueError:
            raise UnknownLabelValue(f"Unknown label value '{value}'", **context) from None
        if label is cls.UNLABELED and not allow_unlabeled:
            raise UnknownLabelValue(f"Label '{value}' is not allowed here", **context)
        return label

    @property
    def target(self) -> Optional[float]:
        """Numeric training target: malicious=1, benign=0."""
        if self is Label.MALICIOUS:
            return 1.0
        if self is Label.BENIGN:
            return 0.0
        return None


@dataclass
class AppSample:
    """One application's extracted intent multiset plus its label."""
    app_id: str
    label: Label
    intents: Counter = field(default_factory=Counter)
    source_path: str = ""

    def __post_init__(self):
        # drop non-positive counts so every present key has count >= 1
        self.intents = Counter({k: int(v) for k, v in self.intents.items() if v >= 1})

    def count(self, key: IntentKey) -> int:
        return self.intents.get(key, 0)

    @property
    def total(self) -> int:
        return sum(self.intents.values())

    def to_dict(self) -> dict:
        return {
            "app_id": self.app_id,
            "label": self.label.value,
            "source_path": self.source_path,
            "intents": [
                {**key.to_dict(), "count": count}
                for key, count in sorted(self.intents.items(), key=lambda kv: kv[0].sort_key)
            ],
        }


@dataclass
class Corpus:
    """Ordered list of samples with per-class counts."""
    samples: List[AppSample] = field(default_factory=list)
    ignored_files: int = 0
    fingerprint: str = ""

    @property
    def label_counts(self) -> Dict[Label, int]:
        counts = {label: 0 for label in Label}
        for sample in self.samples:
            counts[sample.label] += 1
        return counts

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def by_label(self, label: Label) -> List[AppSample]:
        return [s for s in self.samples if s.label is label]

    def app_ids(self) -> List[str]:
        return [s.app_id for s in self.samples]

    def summary(self) -> dict:
        return {
            "samples": len(self.samples),
            "label_counts": {k.value: v for k, v in self.label_counts.items()},
            "ignored_files": self.ignored_files,
            "fingerprint": self.fingerprint,
        }
