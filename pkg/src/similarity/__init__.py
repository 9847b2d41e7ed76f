"""Similarity kernels: cosine scores, top-k selection and stable rankings."""

from .kernel import (
    argsort_desc,
    argsort_desc_rows,
    cosine,
    row_norms,
    sim_vector,
    similarity_block,
    top_k,
    top_k_mean,
    unit_rows,
)

__all__ = [
    "argsort_desc",
    "argsort_desc_rows",
    "cosine",
    "row_norms",
    "sim_vector",
    "similarity_block",
    "top_k",
    "top_k_mean",
    "unit_rows",
]
