# artifacts/__init__.py
from .fingerprint import canonicalize_json, hash_hex, fingerprint_config, hash_file, fingerprint_files
from .run_manifest import RUN_MANIFEST_FILE, RunManifest
from .archive import RunArchive, RunArchiver

__all__ = [
    'canonicalize_json',
    'hash_hex',
    'fingerprint_config',
    'hash_file',
    'fingerprint_files',
    'RUN_MANIFEST_FILE',
    'RunManifest',
    'RunArchive',
    'RunArchiver',
]
