"""Embedding matrix model.

An ``EmbeddingMatrix`` holds the encoder outputs for one modality: the
queries, the gallery or the querybank. Vectors are kept as 32-bit floats
(the on-disk precision); every computation on them accumulates in 64 bits.
"""

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .errors import ShapeError, ValidationError

# Tolerance for the unit-norm invariant of l2-normalised matrices
UNIT_NORM_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """Immutable n x d matrix of embeddings with one unique string id per row.

    Invariants:
    - n >= 1, d >= 1
    - ids are unique
    - data contains no NaN/Inf
    - if l2_normalised, every row norm is within 1e-6 of 1
    """

    ids: tuple[str, ...]
    data: npt.NDArray[np.float32]
    l2_normalised: bool = False
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        data = np.array(self.data, dtype=np.float32, copy=True)

        if data.ndim != 2:
            raise ShapeError(f"Embedding data must be 2-D, got {data.ndim}-D")
        n, d = data.shape
        if n < 1 or d < 1:
            raise ShapeError(f"Embedding matrix must be at least 1x1, got {n}x{d}")
        if len(ids) != n:
            raise ShapeError(f"Got {len(ids)} ids for {n} rows")

        index = {}
        for row, item_id in enumerate(ids):
            if item_id in index:
                raise ValidationError(f"Duplicate id: {item_id!r}")
            index[item_id] = row

        bad_rows = np.flatnonzero(~np.isfinite(data).all(axis=1))
        if bad_rows.size:
            raise ValidationError(
                f"Non-finite value in row for id {ids[bad_rows[0]]!r}"
            )

        if self.l2_normalised:
            norms = np.linalg.norm(data.astype(np.float64), axis=1)
            off = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
            if off.size:
                raise ValidationError(
                    f"Row {ids[off[0]]!r} has norm {norms[off[0]]:.9f}, expected unit norm"
                )

        data.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        """Number of vectors."""
        return self.data.shape[0]

    @property
    def d(self) -> int:
        """Embedding dimensionality."""
        return self.data.shape[1]

    def __len__(self) -> int:
        return self.n

    def index_of(self, item_id: str) -> int:
        """Return the row index of ``item_id``.

        Raises:
            ValidationError: If the id is unknown
        """
        try:
            return self._index[item_id]
        except KeyError:
            raise ValidationError(f"Unknown id: {item_id!r}") from None

    def as_float64(self) -> npt.NDArray[np.float64]:
        """Return a float64 copy of the data for accumulation."""
        return self.data.astype(np.float64)

    def subset(self, rows: npt.ArrayLike) -> "EmbeddingMatrix":
        """Return a new matrix restricted to ``rows`` (in the given order)."""
        rows = np.asarray(rows, dtype=np.int64)
        return EmbeddingMatrix(
            ids=tuple(self.ids[r] for r in rows),
            data=self.data[rows],
            l2_normalised=self.l2_normalised,
        )
