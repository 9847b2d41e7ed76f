"""Ranking and ground-truth models used by retrieval and evaluation."""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import ShapeError, ValidationError

# s_q / eta_q: one real score per gallery item, in gallery order
SimilarityVector = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class Ranking:
    """Descending ranking of a gallery for one query.

    ``order[t]`` is the gallery index at rank position ``t`` (0-based);
    ``scores`` keeps the scores in original gallery order. Equal scores are
    ordered by ascending gallery index.
    """

    order: npt.NDArray[np.int64]
    scores: SimilarityVector

    def __post_init__(self):
        if len(self.order) != len(self.scores):
            raise ShapeError(
                f"Ranking order has {len(self.order)} entries for {len(self.scores)} scores"
            )

    @property
    def gallery_size(self) -> int:
        return len(self.scores)

    def top(self, m: int) -> npt.NDArray[np.int64]:
        """First ``m`` gallery indices (clamped to the gallery size)."""
        return self.order[: max(0, m)]

    def positions(self) -> npt.NDArray[np.int64]:
        """Inverse permutation: 1-indexed rank of every gallery item."""
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[self.order] = np.arange(1, len(self.order) + 1)
        return pos


@dataclass(frozen=True)
class GroundTruth:
    """Per-query sets of relevant gallery indices (at least one each)."""

    relevant: tuple[frozenset[int], ...]
    gallery_size: int

    def __post_init__(self):
        for q, items in enumerate(self.relevant):
            if not items:
                raise ValidationError(f"Query {q} has no relevant gallery item")
            bad = [j for j in items if not 0 <= j < self.gallery_size]
            if bad:
                raise ValidationError(
                    f"Query {q} references gallery index {bad[0]} outside [0, {self.gallery_size})"
                )

    def __len__(self) -> int:
        return len(self.relevant)

    @classmethod
    def single(cls, targets: Iterable[int], gallery_size: int) -> "GroundTruth":
        """Build ground truth with exactly one relevant item per query."""
        return cls(tuple(frozenset([int(t)]) for t in targets), gallery_size)

    @classmethod
    def from_pairs(
        cls,
        query_ids: Sequence[str],
        pairs: Mapping[str, Iterable[int]],
        gallery_size: int,
    ) -> "GroundTruth":
        """Build ground truth ordered by ``query_ids`` from an id -> indices map.

        Raises:
            ValidationError: If a query id has no ground-truth entry
        """
        relevant = []
        for qid in query_ids:
            if qid not in pairs:
                raise ValidationError(f"No ground truth for query id {qid!r}")
            relevant.append(frozenset(int(j) for j in pairs[qid]))
        return cls(tuple(relevant), gallery_size)
