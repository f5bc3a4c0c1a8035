"""Enumeration of graded (3+1)-avoiding posets."""
from .poset import Poset, RankedPoset, contains_3plus1, load_exchange, rank_function
from .series import TruncatedSeries, egf_count
from .genfun import strong_gf, strong_by_height_gf, weak_gf, semiorder_gf
from .oracle import brute_counts, decomposition_sweep

__all__ = [
    "Poset",
    "RankedPoset",
    "TruncatedSeries",
    "brute_counts",
    "contains_3plus1",
    "decomposition_sweep",
    "egf_count",
    "load_exchange",
    "rank_function",
    "semiorder_gf",
    "strong_by_height_gf",
    "strong_gf",
    "weak_gf",
]
