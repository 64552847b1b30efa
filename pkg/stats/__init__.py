# stats/__init__.py
from .intent_stats import (
    IntentStats,
    RankBy,
    class_counts,
    class_counts_from_matrix,
    normalized_difference,
    top_k,
    write_stats_csv,
)

__all__ = [
    'IntentStats',
    'RankBy',
    'class_counts',
    'class_counts_from_matrix',
    'normalized_difference',
    'top_k',
    'write_stats_csv',
]
