# autoencoder/__init__.py
from .sae import AEConfig, EmbeddingMatrix, build_sae, train_ae, encode, decode

__all__ = [
    'AEConfig',
    'EmbeddingMatrix',
    'build_sae',
    'train_ae',
    'encode',
    'decode',
]
