"""Retrieval quality metrics: recall at K, median rank and their geometric mean.

Ranks are 1-indexed. A query with several relevant gallery items is scored
by its best-ranked relevant item.
"""

import logging
from collections.abc import Iterable, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from src.models.errors import ArgumentError, ShapeError, ValidationError
from src.models.ranking import GroundTruth, Ranking
from src.models.reports import RetrievalMetrics

logger = logging.getLogger(__name__)

DEFAULT_KS = (1, 5, 10)
GM_KS = (1, 5, 10)


def best_ranks(rankings: Sequence[Ranking], gt: GroundTruth) -> npt.NDArray[np.int64]:
    """1-indexed rank of the best-ranked relevant item for every query.

    Raises:
        ShapeError: If the number of rankings and ground-truth entries differ
    """
    if len(rankings) != len(gt):
        raise ShapeError(f"Got {len(rankings)} rankings for {len(gt)} ground-truth queries")

    ranks = np.empty(len(rankings), dtype=np.int64)
    for q, (ranking, relevant) in enumerate(zip(rankings, gt.relevant)):
        if ranking.gallery_size != gt.gallery_size:
            raise ShapeError(
                f"Ranking {q} covers {ranking.gallery_size} items, ground truth {gt.gallery_size}"
            )
        positions = ranking.positions()
        ranks[q] = positions[list(relevant)].min()
    return ranks


def recall_from_ranks(ranks: npt.ArrayLike, ks: Iterable[int]) -> dict[int, float]:
    """Percentage of queries whose best rank is <= K, for each K."""
    ranks = np.asarray(ranks, dtype=np.int64)
    out = {}
    for k in ks:
        if k < 1:
            raise ArgumentError(f"Recall cut-off must be >= 1, got {k}")
        out[int(k)] = 100.0 * float(np.mean(ranks <= k)) if ranks.size else 0.0
    return out


def median_from_ranks(ranks: npt.ArrayLike) -> float:
    """Median rank; an even count averages the two central ranks."""
    ranks = np.asarray(ranks, dtype=np.float64)
    if ranks.size == 0:
        raise ArgumentError("Median rank of an empty query set is undefined")
    return float(np.median(ranks))


def recall_at_k(
    rankings: Sequence[Ranking],
    gt: GroundTruth,
    ks: Iterable[int] = DEFAULT_KS,
) -> dict[int, float]:
    """Recall at each K in ``ks`` as a percentage of queries.

    Raises:
        ShapeError: If ``rankings`` and ``gt`` differ in length
        ArgumentError: If a K is below 1
    """
    return recall_from_ranks(best_ranks(rankings, gt), ks)


def median_rank(rankings: Sequence[Ranking], gt: GroundTruth) -> float:
    return median_from_ranks(best_ranks(rankings, gt))


def geometric_mean_r(metrics: RetrievalMetrics) -> float:
    """Cube root of R@1 * R@5 * R@10 (0 when any factor is 0).

    Raises:
        ArgumentError: If one of R@1, R@5, R@10 is missing
    """
    missing = [k for k in GM_KS if k not in metrics.r_at]
    if missing:
        raise ArgumentError(f"Geometric mean needs R@{missing[0]}")
    return _geometric_mean([metrics.r_at[k] for k in GM_KS])


def _geometric_mean(values: Sequence[float]) -> float:
    if any(v < 0 for v in values):
        raise ArgumentError(f"Recall values must be >= 0, got {values}")
    product = float(np.prod(values))
    return float(np.cbrt(product)) if product > 0 else 0.0


def metrics_from_ranks(ranks: npt.ArrayLike, ks: Iterable[int] = DEFAULT_KS) -> RetrievalMetrics:
    """Assemble ``RetrievalMetrics`` from per-query best ranks."""
    ks = sorted(set(ks) | set(GM_KS))
    r_at = recall_from_ranks(ranks, ks)
    return RetrievalMetrics(
        r_at=r_at,
        mdr=median_from_ranks(ranks),
        geometric_mean=_geometric_mean([r_at[k] for k in GM_KS]),
        n_queries=int(np.asarray(ranks).size),
    )


def evaluate(
    rankings: Sequence[Ranking],
    gt: GroundTruth,
    ks: Iterable[int] = DEFAULT_KS,
) -> RetrievalMetrics:
    """R@K for ``ks`` (always including 1, 5, 10), MdR and GM."""
    return metrics_from_ranks(best_ranks(rankings, gt), ks)


def best_ranks_from_ids(
    ranked_ids: Mapping[str, Sequence[str]],
    relevant: Mapping[str, Iterable[str]],
) -> tuple[npt.NDArray[np.int64], int]:
    """Best relevant rank per query from truncated id lists.

    ``ranked_ids`` maps query id to its emitted top-M gallery ids. A query
    whose relevant items are all beyond the emitted list gets the censored
    rank M + 1.

    Returns:
        (ranks in ``ranked_ids`` order, number of censored queries)

    Raises:
        ValidationError: If a query id has no ground-truth entry
    """
    ranks = np.empty(len(ranked_ids), dtype=np.int64)
    censored = 0
    for q, (qid, ids) in enumerate(ranked_ids.items()):
        if qid not in relevant:
            raise ValidationError(f"No ground truth for query id {qid!r}")
        wanted = set(relevant[qid])
        hits = [pos for pos, gid in enumerate(ids, 1) if gid in wanted]
        if hits:
            ranks[q] = hits[0]
        else:
            ranks[q] = len(ids) + 1
            censored += 1
    if censored:
        logger.warning(
            "%d queries have no relevant item in their emitted list; using rank M+1", censored
        )
    return ranks, censored
