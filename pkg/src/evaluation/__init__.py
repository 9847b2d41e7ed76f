"""Retrieval metrics, hubness diagnostics, profiling and formatting."""

from .formatter import ResultFormatter
from .hubness import (
    DEFAULT_K,
    hubness_report,
    k_occurrences,
    occurrences_from_ids,
    report_from_occurrences,
    retrieval_counts,
    skewness,
)
from .metrics import (
    DEFAULT_KS,
    best_ranks,
    best_ranks_from_ids,
    evaluate,
    geometric_mean_r,
    median_rank,
    metrics_from_ranks,
    recall_at_k,
)
from .profiler import NormaliserProfile, NormaliserProfiler

__all__ = [
    "DEFAULT_K",
    "DEFAULT_KS",
    "NormaliserProfile",
    "NormaliserProfiler",
    "ResultFormatter",
    "best_ranks",
    "best_ranks_from_ids",
    "evaluate",
    "geometric_mean_r",
    "hubness_report",
    "k_occurrences",
    "median_rank",
    "metrics_from_ranks",
    "occurrences_from_ids",
    "recall_at_k",
    "report_from_occurrences",
    "retrieval_counts",
    "skewness",
]
