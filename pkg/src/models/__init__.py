"""Domain models for querybank-normalised retrieval.

This package defines the data types shared across storage, similarity,
normalisation, evaluation and the synthetic benchmark:
- Embeddings: EmbeddingMatrix
- Retrieval: Ranking, GroundTruth, SimilarityVector
- Normalisation: NormaliserConfig, ProbeIndex
- Reports: RetrievalMetrics, HubnessReport, RunManifest
- Benchmark: SynthSpec
"""

from .config import METHODS, NormaliserConfig, RunManifest, SynthSpec, default_threads
from .embeddings import EmbeddingMatrix
from .errors import (
    ArgumentError,
    ArtifactMismatchError,
    FormatError,
    IoError,
    QBNormError,
    ShapeError,
    ValidationError,
    ZeroVectorError,
)
from .probe import ProbeIndex
from .ranking import GroundTruth, Ranking, SimilarityVector
from .reports import HubnessReport, RetrievalMetrics

__all__ = [
    "METHODS",
    "ArgumentError",
    "ArtifactMismatchError",
    "EmbeddingMatrix",
    "FormatError",
    "GroundTruth",
    "HubnessReport",
    "IoError",
    "NormaliserConfig",
    "ProbeIndex",
    "QBNormError",
    "Ranking",
    "RetrievalMetrics",
    "RunManifest",
    "ShapeError",
    "SimilarityVector",
    "SynthSpec",
    "ValidationError",
    "ZeroVectorError",
    "default_threads",
]
