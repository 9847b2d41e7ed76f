"""Storage for embeddings, probe artifacts, rankings and reports.

This module provides the binary and CSV embedding handlers, the probe
artifact codec, JSON-lines rankings and JSON report writers. Every write
goes through a temp file and an atomic rename.
"""

from .atomic import atomic_write_bytes, atomic_write_text
from .binary_handler import BinaryHandler
from .csv_handler import CSVHandler
from .embedstore import FORMATS, l2_normalise, load_embeddings, save_embeddings
from .probe_artifact import FORMAT_VERSION, ProbeArtifactHandler
from .rankings_handler import DEFAULT_TOPK_OUTPUT, RankedList, RankingsHandler, ranked_lists
from .report_writer import render_report, write_report

__all__ = [
    "BinaryHandler",
    "CSVHandler",
    "DEFAULT_TOPK_OUTPUT",
    "FORMATS",
    "FORMAT_VERSION",
    "ProbeArtifactHandler",
    "RankedList",
    "RankingsHandler",
    "atomic_write_bytes",
    "atomic_write_text",
    "l2_normalise",
    "load_embeddings",
    "ranked_lists",
    "render_report",
    "save_embeddings",
    "write_report",
]
