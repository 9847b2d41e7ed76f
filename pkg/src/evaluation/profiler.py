"""Per-query latency profiling for the similarity normalisers.

Measures how much a normaliser adds on top of ranking a similarity vector,
using the precomputed probe accelerators. The reference cost is a plain
stable argsort of the same vector.
"""

import statistics
import time
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from src.datagen.generator import gaussian_unit_rows
from src.models.config import NormaliserConfig
from src.models.embeddings import EmbeddingMatrix
from src.models.probe import ProbeIndex
from src.normalise.normalisers import get_normaliser
from src.normalise.probe import build_probe
from src.similarity.kernel import argsort_desc, similarity_block

# Per-query normaliser time allowed relative to argsort
DEFAULT_MAX_OVERHEAD = 5.0


@dataclass
class NormaliserProfile:
    """Timing summary for one normaliser on one gallery size."""

    method: str
    gallery_size: int
    querybank_size: int
    num_queries: int
    median_normalise_ms: float
    median_argsort_ms: float
    p95_normalise_ms: float
    overhead_ratio: float
    normalise_times_ms: List[float]

    def meets_contract(self, max_overhead: float = DEFAULT_MAX_OVERHEAD) -> bool:
        """Check if the median normaliser cost is within ``max_overhead`` x argsort."""
        return self.overhead_ratio <= max_overhead

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out.pop("normalise_times_ms")
        return out


class NormaliserProfiler:
    """Profiler for per-query normaliser cost.

    Builds a synthetic unit-norm gallery and querybank once, then times the
    normaliser and a plain argsort query by query.
    """

    def __init__(
        self,
        gallery_size: int = 100_000,
        querybank_size: int = 100,
        dim: int = 32,
        seed: int = 0,
    ):
        """Initialize profiler.

        Args:
            gallery_size: Number of gallery items
            querybank_size: Number of querybank items used for the probe
            dim: Embedding dimensionality
            seed: Seed for the synthetic vectors
        """
        self.gallery_size = gallery_size
        self.querybank_size = querybank_size
        self.dim = dim
        self.seed = seed
        rng = np.random.default_rng(seed)
        self.gallery = gaussian_unit_rows(rng, gallery_size, dim)
        self.querybank = gaussian_unit_rows(rng, querybank_size, dim)
        self._rng = rng
        self.profiles: List[NormaliserProfile] = []

    def _probe(self, cfg: NormaliserConfig) -> ProbeIndex:
        gallery = EmbeddingMatrix(
            ids=tuple(f"g{j}" for j in range(self.gallery_size)), data=self.gallery
        )
        bank = EmbeddingMatrix(
            ids=tuple(f"b{i}" for i in range(self.querybank_size)), data=self.querybank
        )
        return build_probe(bank, gallery, cfg)

    def benchmark_normaliser(
        self,
        cfg: Optional[NormaliserConfig] = None,
        num_queries: int = 100,
        warmup_runs: int = 3,
    ) -> NormaliserProfile:
        """Time ``cfg.method`` against argsort on ``num_queries`` queries.

        Args:
            cfg: Normaliser configuration (default: dis with default hyperparameters)
            num_queries: Number of timed queries
            warmup_runs: Untimed queries run first

        Returns:
            NormaliserProfile with median and p95 timings
        """
        cfg = cfg or NormaliserConfig(method="dis")
        probe = self._probe(cfg)
        normalise = get_normaliser(cfg.method)

        queries = gaussian_unit_rows(self._rng, num_queries + warmup_runs, self.dim)
        similarities = similarity_block(queries, self.gallery.astype(np.float64))

        for s in similarities[:warmup_runs]:
            normalise(s, probe)
            argsort_desc(s)

        normalise_times = []
        argsort_times = []
        for s in similarities[warmup_runs:]:
            start = time.perf_counter()
            normalise(s, probe)
            normalise_times.append((time.perf_counter() - start) * 1000)

            start = time.perf_counter()
            argsort_desc(s)
            argsort_times.append((time.perf_counter() - start) * 1000)

        median_normalise = statistics.median(normalise_times)
        median_argsort = statistics.median(argsort_times)
        ordered = sorted(normalise_times)
        p95 = ordered[min(len(ordered) - 1, int(len(ordered) * 0.95))]

        profile = NormaliserProfile(
            method=cfg.method,
            gallery_size=self.gallery_size,
            querybank_size=self.querybank_size,
            num_queries=num_queries,
            median_normalise_ms=median_normalise,
            median_argsort_ms=median_argsort,
            p95_normalise_ms=p95,
            overhead_ratio=median_normalise / median_argsort if median_argsort > 0 else float("inf"),
            normalise_times_ms=normalise_times,
        )
        self.profiles.append(profile)
        return profile

    def compare_methods(
        self,
        methods: List[str],
        num_queries: int = 100,
        beta: float = 20.0,
    ) -> Dict[str, NormaliserProfile]:
        """Profile several methods on the same gallery and querybank."""
        return {
            method: self.benchmark_normaliser(
                NormaliserConfig(method=method, beta=beta), num_queries=num_queries
            )
            for method in methods
        }

    def clear_profiles(self) -> None:
        """Clear all stored profiles."""
        self.profiles = []
