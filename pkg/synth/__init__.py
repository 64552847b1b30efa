# synth/__init__.py
from .generator import (
    GeneratorSpec,
    GeneratedCorpus,
    synthetic_keys,
    sample_emissions,
    build_manifest,
    generate_corpus,
    load_ground_truth,
)

__all__ = [
    'GeneratorSpec',
    'GeneratedCorpus',
    'synthetic_keys',
    'sample_emissions',
    'build_manifest',
    'generate_corpus',
    'load_ground_truth',
]
