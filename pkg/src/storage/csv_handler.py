"""CSV storage handler for embeddings, ground truth and retrieval counts.

Embedding CSV files have no header: the first field is the id and the
remaining ``d`` fields are decimal floats. They exist for hand-written
fixtures; the binary ``QBN1`` format is the canonical store.
"""

import csv
import io
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from src.models.embeddings import EmbeddingMatrix
from src.models.errors import FormatError, IoError, ValidationError
from .atomic import atomic_write_text

GROUND_TRUTH_COLUMNS = ["query_id", "gallery_id"]
COUNT_COLUMNS = ["rank", "count"]


class CSVHandler:
    """Handler for the project's CSV files.

    Provides the hand-editable embedding format, the ground-truth pair
    list and the sorted retrieval-count histogram.
    """

    def __init__(self, delimiter: str = ",", quoting: int = csv.QUOTE_MINIMAL):
        """Initialize CSV handler.

        Args:
            delimiter: Field delimiter (default: comma)
            quoting: CSV quoting style used when writing
        """
        self.delimiter = delimiter
        self.quoting = quoting

    def _read_frame(self, path: Path, **kwargs) -> pd.DataFrame:
        path = Path(path)
        if not path.exists():
            raise IoError(f"CSV file not found: {path}")
        try:
            return pd.read_csv(path, sep=self.delimiter, **kwargs)
        except pd.errors.EmptyDataError as e:
            raise FormatError(f"{path}: file is empty") from e
        except pd.errors.ParserError as e:
            raise FormatError(f"{path}: malformed CSV ({e})") from e
        except OSError as e:
            raise IoError(f"Cannot read {path}: {e.strerror or e}") from e

    def read_embeddings(self, path: Path) -> EmbeddingMatrix:
        """Read an embedding CSV (id followed by d floats per row, no header).

        Raises:
            FormatError: On unequal row lengths, missing fields or non-numeric values
            ValidationError: On duplicate ids or NaN/Inf values
        """
        df = self._read_frame(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
        )
        if df.shape[1] < 2:
            raise FormatError(f"{path}: expected an id and at least one value per row")
        # Short rows are padded with NaN by the parser
        if df.isna().to_numpy().any():
            row = int(np.flatnonzero(df.isna().any(axis=1).to_numpy())[0])
            raise FormatError(f"{path}: row {row + 1} has fewer fields than row 1")

        try:
            values = df.iloc[:, 1:].astype(np.float64).to_numpy()
        except ValueError as e:
            raise FormatError(f"{path}: non-numeric value ({e})") from e

        try:
            return EmbeddingMatrix(ids=tuple(df.iloc[:, 0]), data=values)
        except ValidationError as e:
            raise ValidationError(f"{path}: {e}") from e

    def write_embeddings(self, matrix: EmbeddingMatrix, path: Path) -> Path:
        """Write an embedding CSV; 9 significant digits reproduce float32 exactly."""
        df = pd.DataFrame(matrix.data.astype(np.float64))
        df.insert(0, "id", list(matrix.ids))
        buf = io.StringIO()
        df.to_csv(
            buf,
            header=False,
            index=False,
            sep=self.delimiter,
            quoting=self.quoting,
            float_format="%.9g",
            lineterminator="\n",
        )
        return atomic_write_text(Path(path), buf.getvalue())

    def read_ground_truth(self, path: Path) -> Dict[str, List[str]]:
        """Read ``query_id,gallery_id`` pairs into an ordered id -> relevant ids map.

        Raises:
            FormatError: If the header is wrong or a field is empty
        """
        df = self._read_frame(path, dtype=str, keep_default_na=False)
        if list(df.columns) != GROUND_TRUTH_COLUMNS:
            raise FormatError(
                f"{path}: expected header {','.join(GROUND_TRUTH_COLUMNS)}, "
                f"got {','.join(map(str, df.columns))}"
            )
        if df.isna().to_numpy().any() or (df == "").to_numpy().any():
            raise FormatError(f"{path}: empty query_id or gallery_id field")

        relevant: Dict[str, List[str]] = {}
        for qid, gid in zip(df["query_id"], df["gallery_id"]):
            relevant.setdefault(qid, []).append(gid)
        return relevant

    def write_ground_truth(self, pairs: Sequence[Tuple[str, str]], path: Path) -> Path:
        df = pd.DataFrame(list(pairs), columns=GROUND_TRUTH_COLUMNS)
        return atomic_write_text(
            Path(path), df.to_csv(index=False, sep=self.delimiter, lineterminator="\n")
        )

    def write_counts(self, counts: Sequence[int], path: Path) -> Path:
        """Write retrieval counts sorted descending as ``rank,count`` rows."""
        ordered = sorted((int(c) for c in counts), reverse=True)
        df = pd.DataFrame(
            {"rank": np.arange(1, len(ordered) + 1), "count": ordered},
            columns=COUNT_COLUMNS,
        )
        return atomic_write_text(
            Path(path), df.to_csv(index=False, sep=self.delimiter, lineterminator="\n")
        )
