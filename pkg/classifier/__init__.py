# classifier/__init__.py
from .mlp import MLPConfig, ScoreVector, build_mlp, train_mlp, predict

__all__ = [
    'MLPConfig',
    'ScoreVector',
    'build_mlp',
    'train_mlp',
    'predict',
]
