# artifacts/fingerprint.py
"""
Content fingerprints for configs, corpora and output files.
"""

import json
import hashlib
from pathlib import Path
from typing import Any, Iterable, Union


def canonicalize_json(data: Any) -> bytes:
    """
    Convert data to canonical JSON bytes for consistent hashing.
    Uses sorted keys and no whitespace.
    """
    return json.dumps(data, sort_keys=True, separators=(',', ':')).encode('utf-8')


def hash_hex(data: bytes) -> str:
    """SHA-256 hash of data as hex string."""
    return hashlib.sha256(data).hexdigest()


def fingerprint_config(data: Any) -> str:
    return hash_hex(canonicalize_json(data))


def hash_file(path: Union[str, Path]) -> str:
    """Calculate SHA256 hash of a file."""
    sha256 = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(8192), b''):
            sha256.update(chunk)
    return sha256.hexdigest()


def fingerprint_files(paths: Iterable[Union[str, Path]], root: Union[str, Path, None] = None) -> str:
    """
    Combined fingerprint over several files.

    Files are ordered by their path relative to ``root`` so the result does
    not depend on directory listing order.
    """
    root = Path(root) if root is not None else None
    entries = []
    for path in paths:
        path = Path(path)
        rel = path.relative_to(root).as_posix() if root is not None else path.name
        entries.append((rel, hash_file(path)))
    entries.sort()
    sha256 = hashlib.sha256()
    for rel, digest in entries:
        sha256.update(f"{rel}\0{digest}\n".encode('utf-8'))
    return sha256.hexdigest()
