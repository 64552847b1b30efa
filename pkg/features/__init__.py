# features/__init__.py
from .vocabulary import Vocabulary, build_vocabulary
from .matrix import FeatureMatrix, Split, vectorize, split_train_validation

__all__ = [
    'Vocabulary',
    'build_vocabulary',
    'FeatureMatrix',
    'Split',
    'vectorize',
    'split_train_validation',
]
