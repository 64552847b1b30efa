# ingest/__init__.py
"""Manifest parsing and corpus assembly."""

from .intents import IntentKind, IntentKey, normalize_intent_name
from .corpus import Label, AppSample, Corpus
from .manifest import parse_manifest
from .loader import load_corpus, load_unlabeled, read_labels

__all__ = [
    'IntentKind',
    'IntentKey',
    'normalize_intent_name',
    'Label',
    'AppSample',
    'Corpus',
    'parse_manifest',
    'load_corpus',
    'load_unlabeled',
    'read_labels',
]
