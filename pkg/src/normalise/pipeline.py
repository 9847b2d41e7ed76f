"""End-to-end ranking with querybank normalisation.

The probe index is built once per (querybank, gallery, config); queries are
then scored in fixed-size blocks: cosine similarities, the configured
normaliser, and a stable descending argsort. Blocks may run on a thread
pool; their boundaries never depend on the worker count, so the output is
identical to the sequential path.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
import numpy.typing as npt

from src.models.config import NormaliserConfig
from src.models.embeddings import EmbeddingMatrix
from src.models.errors import ArtifactMismatchError, ShapeError
from src.models.probe import ProbeIndex
from src.models.ranking import Ranking
from src.similarity.kernel import argsort_desc_rows, similarity_block, unit_rows
from .normalisers import get_normaliser
from .probe import build_probe, subsample_querybank

logger = logging.getLogger(__name__)

# Queries scored per block
QUERY_CHUNK_ROWS = 256


class QBNormRetriever:
    """Ranks queries against one gallery using a prebuilt probe index.

    Holds the unit-normalised gallery and the probe index so that any number
    of query batches can be ranked without recomputing either.
    """

    def __init__(
        self,
        gallery: EmbeddingMatrix,
        cfg: NormaliserConfig,
        probe: Optional[ProbeIndex] = None,
        threads: int = 1,
    ):
        """Initialize retriever.

        Args:
            gallery: Gallery embeddings
            cfg: Normaliser configuration
            probe: Probe index for ``gallery``; required unless method is ``none``
            threads: Worker threads for query blocks

        Raises:
            ArtifactMismatchError: If the probe does not fit the gallery or config
        """
        self.gallery = gallery
        self.cfg = cfg
        self.probe = probe
        self.threads = max(1, threads)
        self.normaliser = get_normaliser(cfg.method)
        self._unit_gallery = unit_rows(gallery.data, gallery.ids)

        if cfg.method != "none":
            if probe is None:
                raise ArtifactMismatchError(f"Method {cfg.method!r} needs a probe index")
            if probe.gallery_size != gallery.n:
                raise ArtifactMismatchError(
                    f"Probe index covers {probe.gallery_size} gallery items, gallery has {gallery.n}"
                )
            if probe.beta != cfg.beta:
                raise ArtifactMismatchError(
                    f"Probe index was built with beta={probe.beta}, run requests beta={cfg.beta}"
                )
            if cfg.method == "gc" and not probe.has_probe_matrix:
                raise ArtifactMismatchError("Method 'gc' needs a probe index with the probe matrix")
            if cfg.method == "csls" and (not probe.has_csls_means or probe.K_csls != cfg.K_csls):
                raise ArtifactMismatchError(
                    f"Method 'csls' with K_csls={cfg.K_csls} needs matching CSLS means "
                    f"(probe index has K_csls={probe.K_csls})"
                )
            if cfg.method == "dis" and probe.k_activation != cfg.k_activation:
                raise ArtifactMismatchError(
                    f"Probe index activation set uses k={probe.k_activation}, "
                    f"run requests k_activation={cfg.k_activation}"
                )

    @classmethod
    def from_querybank(
        cls,
        gallery: EmbeddingMatrix,
        querybank: EmbeddingMatrix,
        cfg: NormaliserConfig,
        threads: int = 1,
    ) -> "QBNormRetriever":
        """Build the probe index (after optional subsampling) and wrap it."""
        probe = None
        if cfg.method != "none":
            bank = subsample_querybank(querybank, cfg.querybank_size_cap, cfg.querybank_seed)
            probe = build_probe(bank, gallery, cfg, threads=threads)
        return cls(gallery, cfg, probe=probe, threads=threads)

    def score_block(self, unit_queries: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Normalised scores for a block of unit-norm query rows."""
        similarities = similarity_block(unit_queries, self._unit_gallery)
        return self.normaliser(similarities, self.probe)

    def score(self, queries: EmbeddingMatrix) -> npt.NDArray[np.float64]:
        """Normalised scores, one row per query in input order."""
        if queries.d != self.gallery.d:
            raise ShapeError(
                f"Queries have dimension {queries.d}, gallery has {self.gallery.d}"
            )
        unit_queries = unit_rows(queries.data, queries.ids)
        starts = range(0, unit_queries.shape[0], QUERY_CHUNK_ROWS)

        def block(start: int) -> npt.NDArray[np.float64]:
            logger.debug("Scoring queries %d..%d", start, start + QUERY_CHUNK_ROWS)
            return self.score_block(unit_queries[start:start + QUERY_CHUNK_ROWS])

        if self.threads > 1 and len(starts) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                blocks = list(executor.map(block, starts))
        else:
            blocks = [block(start) for start in starts]
        return np.vstack(blocks)

    def rank(self, queries: EmbeddingMatrix) -> list[Ranking]:
        """Rank the gallery for every query, in input order."""
        scores = self.score(queries)
        orders = argsort_desc_rows(scores)
        return [Ranking(order=o, scores=s) for o, s in zip(orders, scores)]


def rank_with_qbnorm(
    queries: EmbeddingMatrix,
    gallery: EmbeddingMatrix,
    querybank: EmbeddingMatrix,
    cfg: NormaliserConfig,
    threads: int = 1,
) -> list[Ranking]:
    """Rank ``gallery`` for every query with querybank normalisation.

    Builds the probe index once (after subsampling the querybank when
    ``cfg.querybank_size_cap`` is set), applies ``cfg.method`` to every
    query's similarities and returns one stable descending ranking per
    query, in input order. Method ``none`` ranks by raw cosine similarity.

    Raises:
        ShapeError: If the matrices do not share a dimensionality
        ZeroVectorError: If any vector is zero
    """
    if not queries.d == gallery.d == querybank.d:
        raise ShapeError(
            f"Dimension mismatch: queries {queries.d}, gallery {gallery.d}, "
            f"querybank {querybank.d}"
        )
    retriever = QBNormRetriever.from_querybank(gallery, querybank, cfg, threads=threads)
    return retriever.rank(queries)
