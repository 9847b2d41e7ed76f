"""Dense similarity, top-k selection and deterministic ranking primitives.

All scores are accumulated in float64. Ties are always broken by ascending
gallery index, so every ranking produced here is reproducible bit for bit.
"""

import numpy as np
import numpy.typing as npt

from src.models.embeddings import EmbeddingMatrix
from src.models.errors import ArgumentError, ShapeError, ValidationError, ZeroVectorError
from src.models.ranking import Ranking, SimilarityVector


def _as_vector(values: npt.ArrayLike, name: str) -> npt.NDArray[np.float64]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {arr.shape}")
    return arr


def cosine(u: npt.ArrayLike, v: npt.ArrayLike) -> float:
    """Cosine similarity of two vectors.

    Raises:
        ShapeError: If the lengths differ
        ZeroVectorError: If either vector is zero
    """
    u = _as_vector(u, "u")
    v = _as_vector(v, "v")
    if u.shape != v.shape:
        raise ShapeError(f"Length mismatch: {u.shape[0]} vs {v.shape[0]}")

    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ZeroVectorError("Cosine similarity is undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


def row_norms(data: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Euclidean norm of every row, accumulated in float64."""
    arr = np.asarray(data, dtype=np.float64)
    return np.sqrt(np.einsum("ij,ij->i", arr, arr))


def unit_rows(
    data: npt.ArrayLike,
    ids: tuple[str, ...] | None = None,
) -> npt.NDArray[np.float64]:
    """Scale every row to unit norm in float64.

    Raises:
        ZeroVectorError: Naming the first zero row (by id when ``ids`` is given)
    """
    arr = np.asarray(data, dtype=np.float64)
    norms = row_norms(arr)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        label = repr(ids[zero[0]]) if ids is not None else f"at row {zero[0]}"
        raise ZeroVectorError(f"Zero vector {label}: cosine similarity is undefined")
    return arr / norms[:, None]


def sim_vector(q: npt.ArrayLike, gallery: EmbeddingMatrix) -> SimilarityVector:
    """Cosine similarity of one query vector against every gallery row.

    Raises:
        ShapeError: If ``len(q) != gallery.d``
        ZeroVectorError: If ``q`` or a gallery row is zero
    """
    q = _as_vector(q, "query")
    if q.shape[0] != gallery.d:
        raise ShapeError(f"Query has dimension {q.shape[0]}, gallery has {gallery.d}")
    qn = np.linalg.norm(q)
    if qn == 0:
        raise ZeroVectorError("Zero query vector: cosine similarity is undefined")
    g = unit_rows(gallery.data, gallery.ids)
    return g @ (q / qn)


def similarity_block(
    queries: npt.NDArray[np.float64],
    gallery: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    """Similarities between unit-row blocks; rows follow ``queries``.

    Both inputs must already be unit-normalised float64 arrays, which makes
    the dot product equal to the cosine similarity.
    """
    if queries.shape[1] != gallery.shape[1]:
        raise ShapeError(
            f"Dimension mismatch: {queries.shape[1]} vs {gallery.shape[1]}"
        )
    return queries @ gallery.T


def top_k(values: npt.ArrayLike, k: int) -> npt.NDArray[np.int64]:
    """Indices of the ``k`` largest values, largest first, ties by ascending index.

    Selection uses introselect (``np.partition``) so the cost is O(n) on
    average plus O(k log k) to order the survivors.

    Raises:
        ArgumentError: If ``k`` is not in [1, len(values)]
        ValidationError: If ``values`` contains NaN
    """
    values = _as_vector(values, "values")
    n = values.shape[0]
    if not 1 <= k <= n:
        raise ArgumentError(f"k must be in [1, {n}], got {k}")
    if np.isnan(values).any():
        raise ValidationError("Cannot select from values containing NaN")

    if k == n:
        candidates = np.arange(n)
    else:
        threshold = np.partition(values, n - k)[n - k]
        above = np.flatnonzero(values > threshold)
        ties = np.flatnonzero(values == threshold)[: k - above.size]
        candidates = np.concatenate([above, ties])

    order = np.lexsort((candidates, -values[candidates]))
    return candidates[order].astype(np.int64)


def top_k_mean(values: npt.ArrayLike, k: int) -> npt.NDArray[np.float64] | float:
    """Mean of the ``k`` largest entries along the last axis.

    Works on a vector (returns a float) or on a 2-D block (one mean per row).
    The selected values need no ordering, so a single partition suffices.
    """
    arr = np.asarray(values, dtype=np.float64)
    n = arr.shape[-1]
    if not 1 <= k <= n:
        raise ArgumentError(f"k must be in [1, {n}], got {k}")
    part = np.partition(arr, n - k, axis=-1)[..., n - k:]
    means = part.mean(axis=-1)
    return float(means) if arr.ndim == 1 else means


def argsort_desc(values: npt.ArrayLike) -> Ranking:
    """Stable descending ranking (equal scores keep ascending index order).

    Raises:
        ValidationError: If ``values`` contains NaN
    """
    values = _as_vector(values, "values")
    if np.isnan(values).any():
        raise ValidationError("Cannot rank values containing NaN")
    order = np.argsort(-values, kind="stable").astype(np.int64)
    return Ranking(order=order, scores=values)


def argsort_desc_rows(scores: npt.NDArray[np.float64]) -> npt.NDArray[np.int64]:
    """Row-wise ``argsort_desc`` for a block of score vectors."""
    if np.isnan(scores).any():
        raise ValidationError("Cannot rank values containing NaN")
    return np.argsort(-scores, axis=1, kind="stable").astype(np.int64)
