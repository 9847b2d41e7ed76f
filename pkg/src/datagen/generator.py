"""Synthetic embedding sets that exhibit hubness.

Gallery rows are Gaussian with a decaying spectrum: axis ``i`` (1-based) has
standard deviation ``1/sqrt(i)`` before the row is unit-normalised. Most of
the mass sits on a few leading axes, so items aligned with them land in many
nearest-neighbour lists (hubs). Queries are noisy copies of their
ground-truth gallery items with isotropic noise of norm about ``NOISE_NORM``,
which keeps retrieval well below saturation at the default correlation.

The querybank comes from one of three sources:
- ``in``: noisy copies of held-out gallery-like anchors, the query distribution
- ``far``: noisy copies of anchors confined to the trailing half of the axes,
  where the gallery has little mass
- ``adversarial``: in-domain candidates whose top-1 gallery items cover the
  fewest distinct items

All draws come from one ``numpy.random.Generator`` seeded by ``SynthSpec.seed``
in a fixed order, so a seed reproduces every matrix bit for bit.
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.models.config import SynthSpec
from src.models.embeddings import EmbeddingMatrix
from src.models.errors import ArgumentError
from src.models.ranking import GroundTruth
from src.similarity.kernel import similarity_block

logger = logging.getLogger(__name__)

QUERY_PREFIX = "q"
GALLERY_PREFIX = "g"
QUERYBANK_PREFIX = "b"
RANDOM_PREFIX = "r"

# Expected norm of the isotropic query noise before mixing
NOISE_NORM = 3.0
# Adversarial querybanks are picked from this many in-domain candidates per slot
ADVERSARIAL_POOL_FACTOR = 4
CANDIDATE_CHUNK_ROWS = 1024


@dataclass(frozen=True, eq=False)
class SynthDataset:
    """Output of ``generate``."""

    queries: EmbeddingMatrix
    gallery: EmbeddingMatrix
    querybank: EmbeddingMatrix
    gt: GroundTruth

    def __iter__(self):
        return iter((self.queries, self.gallery, self.querybank, self.gt))


def make_ids(prefix: str, n: int) -> tuple[str, ...]:
    width = max(5, len(str(n - 1)))
    return tuple(f"{prefix}{i:0{width}d}" for i in range(n))


def _unit(rows: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    # A zero draw has probability 0; guard anyway so the division stays finite
    norms[norms == 0] = 1.0
    return rows / norms


def gaussian_unit_rows(rng: np.random.Generator, n: int, dim: int) -> npt.NDArray[np.float64]:
    """``n`` i.i.d. standard Gaussian rows scaled to unit norm."""
    return _unit(rng.standard_normal((n, dim)))


def axis_scales(dim: int) -> npt.NDArray[np.float64]:
    """Per-axis standard deviations ``1/sqrt(i)`` for ``i = 1..dim``."""
    return 1.0 / np.sqrt(np.arange(1, dim + 1, dtype=np.float64))


def anisotropic_unit_rows(
    rng: np.random.Generator, n: int, dim: int
) -> npt.NDArray[np.float64]:
    """Gaussian rows scaled by ``axis_scales`` and then unit-normalised."""
    return _unit(rng.standard_normal((n, dim)) * axis_scales(dim))


def trailing_subspace_rows(
    rng: np.random.Generator, n: int, dim: int
) -> npt.NDArray[np.float64]:
    """Isotropic unit rows that are zero on the leading ``dim // 2`` axes."""
    rows = rng.standard_normal((n, dim))
    rows[:, : dim // 2] = 0.0
    return _unit(rows)


def noisy_copies(
    rng: np.random.Generator,
    anchors: npt.NDArray[np.float64],
    correlation: float,
    noise_norm: float = NOISE_NORM,
) -> npt.NDArray[np.float64]:
    """``normalise(correlation * anchor + (1 - correlation) * noise)`` per row.

    ``noise`` is isotropic Gaussian with per-axis standard deviation
    ``noise_norm / sqrt(d)``, so its norm is close to ``noise_norm``.
    ``correlation == 1`` returns the anchors themselves.
    """
    dim = anchors.shape[1]
    noise = rng.standard_normal(anchors.shape) * (noise_norm / np.sqrt(dim))
    mixed = correlation * anchors + (1.0 - correlation) * noise
    norms = np.linalg.norm(mixed, axis=1, keepdims=True)
    # Noise cancelling the anchor exactly: fall back to the anchor
    degenerate = norms[:, 0] == 0
    if degenerate.any():
        mixed[degenerate] = anchors[degenerate]
        norms[degenerate] = 1.0
    return mixed / norms


def top1_indices(
    rows: npt.NDArray[np.float64], gallery: npt.NDArray[np.float64]
) -> npt.NDArray[np.int64]:
    """Most similar gallery index per row, lowest index on ties."""
    out = np.empty(rows.shape[0], dtype=np.int64)
    for start in range(0, rows.shape[0], CANDIDATE_CHUNK_ROWS):
        block = similarity_block(rows[start : start + CANDIDATE_CHUNK_ROWS], gallery)
        out[start : start + block.shape[0]] = np.argmax(block, axis=1)
    return out


def select_low_coverage(
    candidates: npt.NDArray[np.float64],
    gallery: npt.NDArray[np.float64],
    n: int,
) -> npt.NDArray[np.int64]:
    """Pick ``n`` candidates whose top-1 gallery items are as few as possible.

    Candidates are grouped by top-1 item and whole groups are taken largest
    first (ties by gallery index), which minimises the number of distinct
    items retrieved. The last group may be cut short.

    Returns:
        Ascending candidate indices
    """
    if not 1 <= n <= candidates.shape[0]:
        raise ArgumentError(f"Cannot select {n} of {candidates.shape[0]} candidates")
    top1 = top1_indices(candidates, gallery)
    counts = np.bincount(top1, minlength=gallery.shape[0])
    group_order = np.lexsort((np.arange(gallery.shape[0]), -counts))
    group_rank = np.empty_like(group_order)
    group_rank[group_order] = np.arange(group_order.size)
    chosen = np.lexsort((np.arange(top1.size), group_rank[top1]))[:n]
    return np.sort(chosen)


def _querybank(
    rng: np.random.Generator,
    spec: SynthSpec,
    gallery: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    n, dim = spec.n_querybank, spec.dim
    if spec.querybank_domain == "far":
        return noisy_copies(rng, trailing_subspace_rows(rng, n, dim), spec.correlation)

    pool = n * ADVERSARIAL_POOL_FACTOR if spec.querybank_domain == "adversarial" else n
    # Held-out anchors: same distribution as the gallery, never one of its rows
    anchors = anisotropic_unit_rows(rng, pool, dim)
    bank = noisy_copies(rng, anchors, spec.correlation)
    if spec.querybank_domain == "adversarial":
        bank = bank[select_low_coverage(bank, gallery, n)]
    return bank


def _matrix(prefix: str, rows: npt.NDArray[np.float64]) -> EmbeddingMatrix:
    return EmbeddingMatrix(
        ids=make_ids(prefix, rows.shape[0]),
        data=rows.astype(np.float32),
    )


def generate(spec: SynthSpec) -> SynthDataset:
    """Draw queries, gallery, querybank and ground truth for ``spec``.

    Draw order: gallery, query noise, querybank anchors, querybank noise.

    Returns:
        SynthDataset; query ``i`` is relevant to gallery item ``i mod n_gallery``
    """
    rng = np.random.default_rng(spec.seed)

    gallery = anisotropic_unit_rows(rng, spec.n_gallery, spec.dim)
    targets = np.array([spec.ground_truth_index(i) for i in range(spec.n_queries)])
    queries = noisy_copies(rng, gallery[targets], spec.correlation)
    querybank = _querybank(rng, spec, gallery)

    logger.info(
        "Generated synthetic set: %d queries, %d gallery, %d %s-domain querybank, d=%d, seed=%d",
        spec.n_queries,
        spec.n_gallery,
        spec.n_querybank,
        spec.querybank_domain,
        spec.dim,
        spec.seed,
    )

    return SynthDataset(
        queries=_matrix(QUERY_PREFIX, queries),
        gallery=_matrix(GALLERY_PREFIX, gallery),
        querybank=_matrix(QUERYBANK_PREFIX, querybank),
        gt=GroundTruth.single(targets, spec.n_gallery),
    )


def supplement_querybank(
    querybank: EmbeddingMatrix,
    extra_random: int,
    seed: int,
) -> EmbeddingMatrix:
    """Append ``extra_random`` uniformly random unit vectors to a querybank.

    Random directions are ids ``r00000...``; ``extra_random == 0`` returns the
    querybank unchanged.
    """
    if extra_random < 0:
        raise ArgumentError(f"extra_random must be >= 0, got {extra_random}")
    if extra_random == 0:
        return querybank

    rng = np.random.default_rng(seed)
    extra = gaussian_unit_rows(rng, extra_random, querybank.d).astype(np.float32)
    logger.info("Supplementing querybank with %d random vectors", extra_random)
    return EmbeddingMatrix(
        ids=querybank.ids + make_ids(RANDOM_PREFIX, extra_random),
        data=np.vstack([querybank.data, extra]),
    )
