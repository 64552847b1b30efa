# ingest/intents.py
"""
Intent identity: the vocabulary atom shared by every downstream stage.
"""

import re
from dataclasses import dataclass, field
from enum import Enum

from errors import EmptyName

# Segments that mark where the short intent name begins
KIND_TOKENS = ("action", "category", "extra")

_INVALID_CHARS = re.compile(r"[^A-Z0-9_]")


class IntentKind(Enum):
    """Kind of a declared intent."""
    ACTION = "action"
    CATEGORY = "category"
    EXTRA = "extra"

    @property
    def order(self) -> int:
        return _KIND_ORDER[self]

    @classmethod
    def from_tag(cls, tag: str) -> "IntentKind":
        return cls(tag.strip().lower())


_KIND_ORDER = {IntentKind.ACTION: 0, IntentKind.CATEGORY: 1, IntentKind.EXTRA: 2}


def normalize_intent_name(raw: str) -> str:
    """
    Reduce a fully qualified intent string to its short upper-case name.

    ``android.intent.action.BOOT_COMPLETED`` -> ``BOOT_COMPLETED``;
    ``com.vendor.intent.action.foo.bar`` -> ``FOO_BAR``. Without a kind token
    the whole string is kept. Characters outside ``[A-Z0-9_]`` become ``_``.
    """
    if raw is None or not raw.strip():
        raise EmptyName("Intent name is empty", raw=raw)

    parts = raw.strip().split(".")
    start = 0
    # first kind token that still has something after it
    for i, part in enumerate(parts[:-1]):
        if part.lower() in KIND_TOKENS:
            start = i + 1
            break

    remainder = [p for p in parts[start:] if p]
    if not remainder:
        raise EmptyName("Intent name is empty after normalization", raw=raw)

    name = "_".join(remainder).upper()
    return _INVALID_CHARS.sub("_", name)


@dataclass(frozen=True)
class IntentKey:
    """One declared intent. Equality and hashing use (kind, name) only."""
    kind: IntentKind
    name: str
    raw: str = field(default="", compare=False, hash=False)

    @classmethod
    def from_raw(cls, kind: IntentKind, raw: str) -> "IntentKey":
        return cls(kind=kind, name=normalize_intent_name(raw), raw=raw)

    @property
    def sort_key(self) -> tuple:
        return (self.kind.order, self.name)

    @property
    def label(self) -> str:
        """Column label used in feature CSV headers."""
        return f"{self.kind.value}:{self.name}"

    @classmethod
    def from_label(cls, label: str) -> "IntentKey":
        kind, _, name = label.partition(":")
        return cls(kind=IntentKind.from_tag(kind), name=name, raw=name)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "name": self.name}

    @classmethod
    def from_dict(cls, data: dict) -> "IntentKey":
        return cls(kind=IntentKind(data["kind"]), name=data["name"], raw=data.get("raw", data["name"]))
