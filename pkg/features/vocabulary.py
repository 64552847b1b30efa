# features/vocabulary.py
"""
Frozen intent vocabulary: the fixed column space of every feature matrix.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Union

from errors import ConfigError, EmptyCorpus
from ingest import Corpus, IntentKey

logger = logging.getLogger("FEATURES")


@dataclass
class Vocabulary:
    """Ordered unique intent keys, sorted by (kind, name)."""
    keys: List[IntentKey] = field(default_factory=list)
    frozen_from: str = ""
    index: Dict[IntentKey, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.keys = sorted(set(self.keys), key=lambda k: k.sort_key)
        self.index = {key: i for i, key in enumerate(self.keys)}

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, key: IntentKey) -> bool:
        return key in self.index

    @property
    def labels(self) -> List[str]:
        return [k.label for k in self.keys]

    def to_dict(self) -> dict:
        return {
            "frozen_from": self.frozen_from,
            "size": len(self.keys),
            "keys": [k.to_dict() for k in self.keys],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        try:
            keys = [IntentKey.from_dict(item) for item in data["keys"]]
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid vocabulary document: {e}") from e
        return cls(keys=keys, frozen_from=data.get("frozen_from", ""))

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Vocabulary":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def build_vocabulary(corpus: Corpus) -> Vocabulary:
    """One column per distinct IntentKey observed anywhere in the corpus."""
    if len(corpus) == 0:
        raise EmptyCorpus("Cannot build a vocabulary from an empty corpus")

    keys = set()
    for sample in corpus:
        keys.update(sample.intents.keys())

    vocab = Vocabulary(keys=list(keys), frozen_from=corpus.fingerprint)
    if not vocab.keys:
        logger.warning("Corpus declares no intents; vocabulary is empty")
    logger.info(f"Vocabulary frozen with {len(vocab)} intents")
    return vocab
