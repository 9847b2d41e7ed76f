"""Hubness diagnostics over a set of rankings.

The k-occurrence N_k(j) counts the queries whose top-k contains gallery
item j. Hubness is the (population) skewness of that distribution: a
long right tail means a few hubs are retrieved for many unrelated queries.
"""

from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from src.models.errors import ArgumentError
from src.models.ranking import Ranking
from src.models.reports import HubnessReport

# Default neighbourhood size for the k-occurrence statistic
DEFAULT_K = 10
# Hubs listed in a report
TOP_HUBS = 10


def occurrences_from_topk(
    top_lists: Sequence[npt.ArrayLike],
    gallery_size: int,
) -> npt.NDArray[np.int64]:
    """Count how often each gallery index appears across the given top lists."""
    if not top_lists:
        return np.zeros(gallery_size, dtype=np.int64)
    flat = np.concatenate([np.asarray(t, dtype=np.int64) for t in top_lists])
    return np.bincount(flat, minlength=gallery_size).astype(np.int64)


def k_occurrences(
    rankings: Sequence[Ranking],
    k: int,
    gallery_size: int,
) -> npt.NDArray[np.int64]:
    """k-occurrence count of every gallery item; sums to ``k * len(rankings)``.

    Raises:
        ArgumentError: If ``k`` is not in [1, gallery_size]
    """
    if not 1 <= k <= gallery_size:
        raise ArgumentError(f"k must be in [1, {gallery_size}], got {k}")
    return occurrences_from_topk([r.top(k) for r in rankings], gallery_size)


def skewness(n_k: npt.ArrayLike) -> float:
    """Population skewness E[(N_k - mu)^3] / sigma^3; 0 when sigma is 0.

    Raises:
        ArgumentError: On empty input
    """
    x = np.asarray(n_k, dtype=np.float64)
    if x.size == 0:
        raise ArgumentError("Skewness of an empty distribution is undefined")
    deviations = x - x.mean()
    sigma = np.sqrt(np.mean(deviations**2))
    if sigma == 0:
        return 0.0
    return float(np.mean(deviations**3) / sigma**3)


def report_from_occurrences(n_k: npt.ArrayLike, k: int) -> HubnessReport:
    """Summarise a k-occurrence vector."""
    n_k = np.asarray(n_k, dtype=np.int64)
    # Strongest hubs first, lowest index on ties
    order = np.lexsort((np.arange(n_k.size), -n_k))
    hubs = tuple(int(j) for j in order[:TOP_HUBS] if n_k[j] > 0)
    return HubnessReport(
        k=k,
        n_k=n_k,
        skewness=skewness(n_k),
        max_count=int(n_k.max()),
        unretrieved=int(np.count_nonzero(n_k == 0)),
        top_hubs=hubs,
    )


def hubness_report(
    rankings: Sequence[Ranking],
    gallery_size: int,
    k: int = DEFAULT_K,
) -> HubnessReport:
    """k-occurrence distribution, skewness, largest count and anti-hub count."""
    return report_from_occurrences(k_occurrences(rankings, k, gallery_size), k)


def retrieval_counts(rankings: Sequence[Ranking], gallery_size: int) -> list[int]:
    """Top-1 retrieval count per gallery item, sorted descending.

    The sum equals the number of queries.
    """
    counts = occurrences_from_topk([r.top(1) for r in rankings], gallery_size)
    return sorted((int(c) for c in counts), reverse=True)


def occurrences_from_ids(
    ranked_ids: Sequence[Sequence[str]],
    k: int,
    gallery_size: int,
) -> tuple[npt.NDArray[np.int64], list[str]]:
    """k-occurrences from gallery id lists whose gallery has ``gallery_size`` items.

    Ids get indices in order of first appearance; items that never appear
    fill the remaining slots with a count of 0.

    Returns:
        (n_k of length ``gallery_size``, ids of the first indices)

    Raises:
        ArgumentError: If ``k`` is out of range, a list is shorter than ``k``,
            or more distinct ids appear than ``gallery_size``
    """
    if not 1 <= k <= gallery_size:
        raise ArgumentError(f"k must be in [1, {gallery_size}], got {k}")

    index: dict[str, int] = {}
    top_lists = []
    for q, ids in enumerate(ranked_ids):
        if len(ids) < k:
            raise ArgumentError(f"Ranking {q} lists {len(ids)} items, fewer than k={k}")
        top_lists.append([index.setdefault(gid, len(index)) for gid in ids[:k]])
        if len(index) > gallery_size:
            raise ArgumentError(
                f"Rankings reference more than gallery size {gallery_size} distinct items"
            )
    return occurrences_from_topk(top_lists, gallery_size), list(index)
