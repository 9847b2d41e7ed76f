"""Querybank similarity normalisers: GC, CSLS, IS and Dynamic IS.

Every normaliser maps unnormalised similarities ``s`` to normalised scores
``eta`` of the same shape. ``s`` may be one similarity vector (|G|,) or a
block of query rows (B, |G|); the block form is what the ranking pipeline
uses and gives the same values row by row.
"""

from typing import Callable, Optional

import numpy as np
import numpy.typing as npt

from src.models.errors import ArgumentError, ShapeError
from src.models.probe import EXP_SAFE_LIMIT, ProbeIndex
from src.models.ranking import SimilarityVector
from src.similarity.kernel import top_k_mean

Normaliser = Callable[[npt.NDArray[np.float64], ProbeIndex], npt.NDArray[np.float64]]


def _check(s: npt.ArrayLike, p: ProbeIndex) -> npt.NDArray[np.float64]:
    s = np.asarray(s, dtype=np.float64)
    if s.ndim not in (1, 2) or s.shape[-1] != p.gallery_size:
        raise ShapeError(
            f"Similarities of shape {s.shape} do not match gallery size {p.gallery_size}"
        )
    return s


def querybank_rank(s: npt.ArrayLike, sorted_rows: npt.NDArray[np.float64]) -> npt.NDArray[np.int64]:
    """Number of probe entries strictly greater than ``s[j]`` in row ``j``.

    Binary search over the ascending rows, vectorised across the gallery:
    each step halves the candidate interval of every item at once.
    """
    s = np.asarray(s, dtype=np.float64)
    n_gallery, n_bank = sorted_rows.shape
    cols = np.arange(n_gallery)

    # lo converges to the count of entries <= s
    lo = np.zeros(s.shape, dtype=np.int64)
    hi = np.full(s.shape, n_bank, dtype=np.int64)
    while True:
        active = lo < hi
        if not active.any():
            break
        mid = (lo + hi) // 2
        probe_values = sorted_rows[cols, np.minimum(mid, n_bank - 1)]
        at_or_below = probe_values <= s
        lo = np.where(active & at_or_below, mid + 1, lo)
        hi = np.where(active & ~at_or_below, mid, hi)
    return n_bank - lo


def normalise_gc(s: SimilarityVector, p: ProbeIndex) -> SimilarityVector:
    """Globally-corrected retrieval: ``eta(j) = -(Rank(s(j), P[j]) - s(j))``.

    Rank counts querybank similarities strictly greater than ``s(j)``, so it
    lies in {0..N} and equal probe entries never demote the query.

    Raises:
        ShapeError: On a length mismatch
        ArgumentError: If the probe index was built without the probe matrix
    """
    s = _check(s, p)
    if p.sorted_rows is None:
        raise ArgumentError("GC needs the full probe matrix; build the probe with method 'gc'")
    return -(querybank_rank(s, p.sorted_rows) - s)


def normalise_csls(s: SimilarityVector, p: ProbeIndex) -> SimilarityVector:
    """Cross-domain similarity local scaling restricted to the querybank.

    ``eta(j) = 2 s(j) - mean(top-K of s) - mean(top-K of P[j])``

    Raises:
        ArgumentError: If K_csls exceeds min(N, |G|)
    """
    s = _check(s, p)
    if p.csls_topk_mean is None or p.K_csls > p.gallery_size:
        raise ArgumentError(
            f"K_csls={p.K_csls} exceeds min(querybank size {p.querybank_size}, "
            f"gallery size {p.gallery_size})"
        )
    query_mean = top_k_mean(s, p.K_csls)
    if s.ndim == 2:
        query_mean = query_mean[:, None]
    return 2.0 * s - query_mean - p.csls_topk_mean


def normalise_is(s: SimilarityVector, p: ProbeIndex) -> SimilarityVector:
    """Inverted softmax: ``eta(j) = exp(beta s(j)) / D[j]``.

    Uses the precomputed denominators, so the per-query cost is O(|G|).
    Switches to ``exp(beta s(j) - log D[j])`` when an exponent exceeds 700.
    A query row whose ``beta s(j) - log D[j]`` exceeds 700 for some item
    gets that log score instead: it ranks identically and stays finite.
    """
    s = _check(s, p)
    scaled = p.beta * s
    log_eta = scaled - p.is_log_denominators
    overflow = log_eta.max(axis=-1, keepdims=True) > EXP_SAFE_LIMIT
    if overflow.any():
        return np.where(overflow, log_eta, np.exp(np.minimum(log_eta, EXP_SAFE_LIMIT)))
    if p.log_space or np.abs(scaled).max(initial=0.0) > EXP_SAFE_LIMIT:
        return np.exp(log_eta)
    return np.exp(scaled) / p.is_denominators


def normalise_dis(s: SimilarityVector, p: ProbeIndex) -> SimilarityVector:
    """Dynamic inverted softmax.

    Applies ``normalise_is`` only to queries whose unnormalised top-1 gallery
    item (lowest index on ties) is in the activation set; all other queries
    keep their similarities bit for bit.
    """
    s = _check(s, p)
    if s.ndim == 1:
        if p.activation_mask[int(np.argmax(s))]:
            return normalise_is(s, p)
        return s.copy()

    activate = p.activation_mask[np.argmax(s, axis=1)]
    eta = s.copy()
    if activate.any():
        eta[activate] = normalise_is(s[activate], p)
    return eta


def identity(s: SimilarityVector, p: Optional[ProbeIndex] = None) -> SimilarityVector:
    """The ``none`` method: unnormalised similarities."""
    return np.array(s, dtype=np.float64, copy=True)


NORMALISERS: dict[str, Normaliser] = {
    "none": identity,
    "gc": normalise_gc,
    "csls": normalise_csls,
    "is": normalise_is,
    "dis": normalise_dis,
}


def get_normaliser(method: str) -> Normaliser:
    try:
        return NORMALISERS[method]
    except KeyError:
        raise ArgumentError(f"Unknown method {method!r}") from None
