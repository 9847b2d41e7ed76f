"""Precomputed querybank probe structures."""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import numpy.typing as npt

# exp() overflows float64 just above 709; beyond this IS works in log space
EXP_SAFE_LIMIT = 700.0


@dataclass(frozen=True, eq=False)
class ProbeIndex:
    """Querybank-vs-gallery accelerators built once and shared by all queries.

    Only the O(|G|) accelerators are always present. The full |G| x N probe
    matrix and its row-sorted copy are kept only when GC needs them.

    Attributes:
        gallery_size: |G|
        querybank_size: N
        beta: Inverse temperature the IS denominators were built with
        k_activation: Top-k per querybank item used for the activation set
        K_csls: CSLS neighbourhood size
        is_denominators: D[j] = sum_i exp(beta * P[j, i]); may overflow to inf
        is_log_denominators: log D[j], always finite
        csls_topk_mean: Mean of the K_csls largest P[j, :]; None when K_csls > min(N, |G|)
        activation_set: Ascending gallery indices that are some querybank item's top-k
        probe: Full probe matrix P (gallery rows, querybank columns), or None
        sorted_rows: P with each row sorted ascending, or None
    """

    gallery_size: int
    querybank_size: int
    beta: float
    k_activation: int
    K_csls: int
    is_denominators: npt.NDArray[np.float64]
    is_log_denominators: npt.NDArray[np.float64]
    csls_topk_mean: Optional[npt.NDArray[np.float64]]
    activation_set: npt.NDArray[np.int64]
    probe: Optional[npt.NDArray[np.float64]] = None
    sorted_rows: Optional[npt.NDArray[np.float64]] = None

    @property
    def has_probe_matrix(self) -> bool:
        return self.sorted_rows is not None

    @property
    def has_csls_means(self) -> bool:
        return self.csls_topk_mean is not None

    @cached_property
    def log_space(self) -> bool:
        """True when the direct IS denominators are unusable (overflow/underflow)."""
        d = self.is_denominators
        return bool(
            not np.isfinite(d).all()
            or (d <= 0).any()
            or np.abs(self.is_log_denominators).max() > EXP_SAFE_LIMIT
        )

    @cached_property
    def activation_mask(self) -> npt.NDArray[np.bool_]:
        """Boolean membership vector over the gallery."""
        mask = np.zeros(self.gallery_size, dtype=bool)
        mask[self.activation_set] = True
        mask.setflags(write=False)
        return mask
