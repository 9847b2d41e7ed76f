"""Querybank probe construction.

For every gallery item ``g_j`` and querybank item ``b_i`` the probe matrix
holds ``P[j, i] = cos(b_i, g_j)``. From it we precompute, once per
querybank, everything a normaliser needs per query:

- IS/DIS: denominators ``D[j] = sum_i exp(beta * P[j, i])`` (and their logs)
- CSLS: mean of the ``K`` largest entries of each probe row
- DIS: the activation set, the union of every querybank item's top-k gallery items
- GC: the probe rows sorted ascending, for binary-search ranks
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
import numpy.typing as npt
from scipy.special import logsumexp

from src.models.config import NormaliserConfig
from src.models.embeddings import EmbeddingMatrix
from src.models.errors import ArgumentError, ShapeError
from src.models.probe import EXP_SAFE_LIMIT, ProbeIndex
from src.similarity.kernel import similarity_block, top_k_mean, unit_rows

logger = logging.getLogger(__name__)

# Gallery rows per probe block; fixed so results never depend on thread count
PROBE_CHUNK_ROWS = 1024


def probe_matrix(
    querybank: EmbeddingMatrix,
    gallery: EmbeddingMatrix,
    threads: int = 1,
) -> npt.NDArray[np.float64]:
    """Compute the |G| x N probe matrix of cosine similarities.

    Raises:
        ShapeError: If the dimensionalities differ
        ZeroVectorError: If any vector is zero
    """
    if querybank.d != gallery.d:
        raise ShapeError(
            f"Querybank has dimension {querybank.d}, gallery has {gallery.d}"
        )
    bank = unit_rows(querybank.data, querybank.ids)
    rows = unit_rows(gallery.data, gallery.ids)

    starts = range(0, rows.shape[0], PROBE_CHUNK_ROWS)

    def block(start: int) -> npt.NDArray[np.float64]:
        return similarity_block(rows[start:start + PROBE_CHUNK_ROWS], bank)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            blocks = list(executor.map(block, starts))
    else:
        blocks = [block(start) for start in starts]
    return np.vstack(blocks)


def inverted_softmax_denominators(
    probe: npt.NDArray[np.float64],
    beta: float,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Return ``(D, log D)`` with ``D[j] = sum_i exp(beta * probe[j, i])``.

    The direct sum is used while every exponent stays within +-700; beyond
    that ``log D`` comes from logsumexp and ``D`` may overflow to inf.
    """
    scaled = beta * probe
    if np.abs(scaled).max() <= EXP_SAFE_LIMIT:
        denominators = np.exp(scaled).sum(axis=1)
        return denominators, np.log(denominators)

    logger.info("Probe exponents exceed %.0f; using log-space denominators", EXP_SAFE_LIMIT)
    log_denominators = logsumexp(scaled, axis=1)
    with np.errstate(over="ignore"):
        denominators = np.exp(log_denominators)
    return denominators, log_denominators


def activation_set(probe: npt.NDArray[np.float64], k: int) -> npt.NDArray[np.int64]:
    """Union over querybank items (columns) of their ``k`` most similar gallery rows.

    Ties at the k-th value are resolved by ascending gallery index, matching
    ``top_k``. Returns the sorted gallery indices.
    """
    n_gallery = probe.shape[0]
    if not 1 <= k <= n_gallery:
        raise ArgumentError(f"k_activation must be in [1, {n_gallery}], got {k}")

    if k == 1:
        # argmax returns the first maximum, i.e. the lowest tied index
        return np.unique(np.argmax(probe, axis=0)).astype(np.int64)

    threshold = np.partition(probe, n_gallery - k, axis=0)[n_gallery - k]
    above = probe > threshold
    tied = probe == threshold
    needed = k - above.sum(axis=0)
    selected = above | (tied & (np.cumsum(tied, axis=0) <= needed))
    return np.unique(np.nonzero(selected)[0]).astype(np.int64)


def build_probe(
    querybank: EmbeddingMatrix,
    gallery: EmbeddingMatrix,
    cfg: NormaliserConfig,
    keep_probe: Optional[bool] = None,
    threads: int = 1,
) -> ProbeIndex:
    """Precompute the querybank probe structures for ``cfg``.

    Args:
        querybank: Query-modality probe vectors (N rows)
        gallery: Gallery vectors (|G| rows)
        cfg: Normaliser configuration (beta, k_activation, K_csls)
        keep_probe: Keep the full probe matrix; defaults to ``cfg.method == "gc"``
        threads: Workers for the probe matrix product

    Returns:
        ProbeIndex with IS denominators, CSLS means (when K_csls <= min(N, |G|)),
        the activation set and, if kept, the probe matrix and its sorted rows

    Raises:
        ShapeError: If the dimensionalities differ
        ZeroVectorError: If any vector is zero
    """
    probe = probe_matrix(querybank, gallery, threads=threads)
    n_gallery, n_bank = probe.shape

    denominators, log_denominators = inverted_softmax_denominators(probe, cfg.beta)

    csls_means = None
    if cfg.K_csls <= min(n_bank, n_gallery):
        csls_means = top_k_mean(probe, cfg.K_csls)
    elif cfg.method == "csls":
        raise ArgumentError(
            f"K_csls={cfg.K_csls} exceeds min(querybank size {n_bank}, gallery size {n_gallery})"
        )

    k_activation = cfg.k_activation
    if k_activation > n_gallery:
        logger.warning(
            "k_activation=%d exceeds gallery size %d; clamping", k_activation, n_gallery
        )
        k_activation = n_gallery
    active = activation_set(probe, k_activation)

    if keep_probe is None:
        keep_probe = cfg.needs_probe_matrix
    sorted_rows = np.sort(probe, axis=1) if keep_probe else None

    logger.info(
        "Built probe index: |G|=%d, N=%d, |A|=%d, beta=%g%s",
        n_gallery,
        n_bank,
        active.size,
        cfg.beta,
        ", probe matrix kept" if keep_probe else "",
    )

    return ProbeIndex(
        gallery_size=n_gallery,
        querybank_size=n_bank,
        beta=cfg.beta,
        k_activation=cfg.k_activation,
        K_csls=cfg.K_csls,
        is_denominators=denominators,
        is_log_denominators=log_denominators,
        csls_topk_mean=csls_means,
        activation_set=active,
        probe=probe if keep_probe else None,
        sorted_rows=sorted_rows,
    )


def subsample_querybank(
    querybank: EmbeddingMatrix,
    cap: Optional[int],
    seed: int,
) -> EmbeddingMatrix:
    """Uniformly subsample ``querybank`` to at most ``cap`` rows (order kept)."""
    if cap is None or querybank.n <= cap:
        return querybank
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(querybank.n, size=cap, replace=False))
    logger.info("Subsampled querybank from %d to %d items (seed %d)", querybank.n, cap, seed)
    return querybank.subset(rows)
