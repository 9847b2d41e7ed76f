"""Command-line interface for querybank normalisation.

This module provides the ``qbnorm`` command group: precompute, rank, eval,
hubness, synth, sweep and bench.
"""

__all__ = ["bench", "evaluate", "hubness", "main", "precompute", "rank", "sweep", "synth"]
