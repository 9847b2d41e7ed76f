"""Evaluation report models.

Both reports serialise to the flat JSON keys shared by ``eval``,
``hubness`` and ``synth``: ``R@1``, ``R@5``, ``R@10``, ``MdR``, ``GM``,
``skewness``, ``max_count``, ``unretrieved`` and ``k``.
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

# Decimal places for every float written to a report
REPORT_DECIMALS = 4


def round_report(value: float) -> float:
    """Round a float for report output."""
    return round(float(value), REPORT_DECIMALS)


@dataclass(frozen=True)
class RetrievalMetrics:
    """Recall at K (percentages), median rank and geometric mean of R@{1,5,10}."""

    r_at: dict[int, float]
    mdr: float
    geometric_mean: float
    n_queries: int = 0

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {f"R@{k}": round_report(v) for k, v in sorted(self.r_at.items())}
        out["MdR"] = round_report(self.mdr)
        out["GM"] = round_report(self.geometric_mean)
        return out


@dataclass(frozen=True, eq=False)
class HubnessReport:
    """k-occurrence distribution of a set of rankings and its skewness.

    Attributes:
        k: Neighbourhood size of the occurrence count
        n_k: Occurrence count per gallery item
        skewness: Population skewness of ``n_k`` (0 when constant)
        max_count: Largest occurrence count (the strongest hub)
        unretrieved: Gallery items that never appear in any top-k (anti-hubs)
        top_hubs: Gallery indices with the largest counts, strongest first
    """

    k: int
    n_k: npt.NDArray[np.int64]
    skewness: float
    max_count: int
    unretrieved: int
    top_hubs: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "skewness": round_report(self.skewness),
            "max_count": int(self.max_count),
            "unretrieved": int(self.unretrieved),
            "top_hubs": [int(j) for j in self.top_hubs],
        }
