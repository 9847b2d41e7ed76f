"""Querybank normalisation: probe construction, normalisers and ranking."""

from .normalisers import (
    NORMALISERS,
    get_normaliser,
    normalise_csls,
    normalise_dis,
    normalise_gc,
    normalise_is,
    querybank_rank,
)
from .pipeline import QBNormRetriever, rank_with_qbnorm
from .probe import activation_set, build_probe, probe_matrix, subsample_querybank

__all__ = [
    "NORMALISERS",
    "QBNormRetriever",
    "activation_set",
    "build_probe",
    "get_normaliser",
    "normalise_csls",
    "normalise_dis",
    "normalise_gc",
    "normalise_is",
    "probe_matrix",
    "querybank_rank",
    "rank_with_qbnorm",
    "subsample_querybank",
]
