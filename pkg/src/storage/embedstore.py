"""Load, validate, normalise and persist embedding matrices.

This is the single entry point every other module uses to obtain vectors.
"""

import logging
from pathlib import Path

from src.models.embeddings import EmbeddingMatrix
from src.models.errors import ArgumentError
from src.similarity.kernel import unit_rows
from .binary_handler import BinaryHandler
from .csv_handler import CSVHandler

logger = logging.getLogger(__name__)

FORMATS = ("binary", "csv")


def load_embeddings(path: Path, format: str = "binary") -> EmbeddingMatrix:
    """Load an embedding matrix from a ``QBN1`` or CSV file.

    The result always has ``l2_normalised=False``, whatever the stored norms.

    Raises:
        ArgumentError: On an unknown format name
        IoError: If the file cannot be read
        FormatError: If the file is malformed
        ValidationError: On duplicate ids or NaN/Inf entries
    """
    if format == "binary":
        matrix = BinaryHandler().read(Path(path))
    elif format == "csv":
        matrix = CSVHandler().read_embeddings(Path(path))
    else:
        raise ArgumentError(f"Unknown embedding format {format!r}; expected one of {FORMATS}")

    logger.info("Loaded %d x %d embeddings from %s", matrix.n, matrix.d, path)
    return matrix


def save_embeddings(m: EmbeddingMatrix, path: Path) -> None:
    """Write ``m`` in the binary format (atomic; bit-exact on reload)."""
    BinaryHandler().write(m, Path(path))
    logger.info("Saved %d x %d embeddings to %s", m.n, m.d, path)


def l2_normalise(m: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit Euclidean norm.

    Raises:
        ZeroVectorError: Naming the id of the first zero row
    """
    if m.l2_normalised:
        return m
    return EmbeddingMatrix(ids=m.ids, data=unit_rows(m.data, m.ids), l2_normalised=True)
