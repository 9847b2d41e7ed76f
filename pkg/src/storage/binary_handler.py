"""Binary embedding file handler (``QBN1`` format).

Layout (little-endian):
    magic      4 bytes  b"QBN1"
    n, d       u32, u32
    id block   n x (u16 byte length + UTF-8 bytes)
    values     n * d f32, row-major

Values are stored as float32, so a save/load round trip of an
``EmbeddingMatrix`` is bit-exact.
"""

import struct
from pathlib import Path

import numpy as np

from src.models.embeddings import EmbeddingMatrix
from src.models.errors import FormatError, IoError, ValidationError
from .atomic import atomic_write_bytes

MAGIC = b"QBN1"
HEADER = struct.Struct("<4sII")
ID_LENGTH = struct.Struct("<H")
MAX_ID_BYTES = 0xFFFF
VALUE_DTYPE = np.dtype("<f4")


class BinaryHandler:
    """Reader/writer for ``QBN1`` embedding files."""

    suffix = ".qbn"

    def write(self, matrix: EmbeddingMatrix, path: Path) -> Path:
        """Serialise ``matrix`` to ``path`` atomically.

        Args:
            matrix: Embeddings to write
            path: Destination file

        Returns:
            Path to written file

        Raises:
            ValidationError: If an id is longer than 65535 UTF-8 bytes
            IoError: If the file cannot be written
        """
        parts = [HEADER.pack(MAGIC, matrix.n, matrix.d)]
        for item_id in matrix.ids:
            raw = item_id.encode("utf-8")
            if len(raw) > MAX_ID_BYTES:
                raise ValidationError(f"Id {item_id[:32]!r}... exceeds {MAX_ID_BYTES} bytes")
            parts.append(ID_LENGTH.pack(len(raw)))
            parts.append(raw)
        parts.append(np.ascontiguousarray(matrix.data, dtype=VALUE_DTYPE).tobytes())

        return atomic_write_bytes(Path(path), b"".join(parts))

    def read(self, path: Path) -> EmbeddingMatrix:
        """Load a ``QBN1`` file.

        Raises:
            IoError: If the file cannot be read
            FormatError: On bad magic, truncation or trailing bytes
            ValidationError: On duplicate ids or non-finite values
        """
        path = Path(path)
        try:
            payload = path.read_bytes()
        except OSError as e:
            raise IoError(f"Cannot read {path}: {e.strerror or e}") from e

        if len(payload) < HEADER.size:
            raise FormatError(f"{path}: file too short for a QBN1 header")
        magic, n, d = HEADER.unpack_from(payload, 0)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if n < 1 or d < 1:
            raise FormatError(f"{path}: header declares an empty {n}x{d} matrix")

        offset = HEADER.size
        ids = []
        for row in range(n):
            if offset + ID_LENGTH.size > len(payload):
                raise FormatError(f"{path}: id block truncated at id {row}")
            (length,) = ID_LENGTH.unpack_from(payload, offset)
            offset += ID_LENGTH.size
            raw = payload[offset:offset + length]
            if len(raw) != length:
                raise FormatError(f"{path}: id block truncated at id {row}")
            try:
                ids.append(raw.decode("utf-8"))
            except UnicodeDecodeError as e:
                raise FormatError(f"{path}: id {row} is not valid UTF-8") from e
            offset += length

        expected = n * d * VALUE_DTYPE.itemsize
        remaining = len(payload) - offset
        if remaining != expected:
            raise FormatError(
                f"{path}: expected {expected} bytes of values for {n}x{d}, found {remaining}"
            )
        data = np.frombuffer(payload, dtype=VALUE_DTYPE, count=n * d, offset=offset)

        try:
            return EmbeddingMatrix(ids=tuple(ids), data=data.reshape(n, d))
        except ValidationError as e:
            raise ValidationError(f"{path}: {e}") from e
