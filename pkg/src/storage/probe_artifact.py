"""Binary probe artifact (``QBNP`` format).

Layout (little-endian):
    magic          4 bytes  b"QBNP"
    version        u16
    method         u8       index into METHODS
    beta           f64
    k_activation   u32
    K_csls         u32
    gallery size   u32
    querybank size u32
    flags          u8       bit0: CSLS means present, bit1: probe matrix present
    D              f64[|G|]
    log D          f64[|G|]
    CSLS means     f64[|G|]           (bit0)
    |A|            u32
    A              u32[|A|] ascending
    probe matrix   f64[|G| * N]       (bit1, row-major, gallery rows)

Gallery ids are not stored; consumers check the gallery size instead.
"""

import logging
import struct
from pathlib import Path

import numpy as np

from src.models.config import METHODS, NormaliserConfig
from src.models.errors import ArtifactMismatchError, FormatError, IoError
from src.models.probe import ProbeIndex
from .atomic import atomic_write_bytes

logger = logging.getLogger(__name__)

MAGIC = b"QBNP"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sHBdIIIIB")
COUNT = struct.Struct("<I")
FLAG_CSLS = 0b01
FLAG_PROBE = 0b10
F64 = np.dtype("<f8")
U32 = np.dtype("<u4")


class ProbeArtifactHandler:
    """Reader/writer for probe artifacts."""

    suffix = ".qbnp"

    def write(self, probe: ProbeIndex, cfg: NormaliserConfig, path: Path) -> Path:
        """Serialise the accelerators of ``probe`` (and the matrix iff kept).

        Args:
            probe: Built probe index
            cfg: Configuration the probe was built with; its method is recorded
            path: Destination file

        Returns:
            Path to written file
        """
        flags = 0
        if probe.has_csls_means:
            flags |= FLAG_CSLS
        if probe.probe is not None:
            flags |= FLAG_PROBE

        parts = [
            HEADER.pack(
                MAGIC,
                FORMAT_VERSION,
                METHODS.index(cfg.method),
                probe.beta,
                probe.k_activation,
                probe.K_csls,
                probe.gallery_size,
                probe.querybank_size,
                flags,
            ),
            np.ascontiguousarray(probe.is_denominators, dtype=F64).tobytes(),
            np.ascontiguousarray(probe.is_log_denominators, dtype=F64).tobytes(),
        ]
        if flags & FLAG_CSLS:
            parts.append(np.ascontiguousarray(probe.csls_topk_mean, dtype=F64).tobytes())
        parts.append(COUNT.pack(probe.activation_set.size))
        parts.append(np.ascontiguousarray(probe.activation_set, dtype=U32).tobytes())
        if flags & FLAG_PROBE:
            parts.append(np.ascontiguousarray(probe.probe, dtype=F64).tobytes())

        written = atomic_write_bytes(Path(path), b"".join(parts))
        logger.info("Wrote probe artifact %s (flags=%d)", path, flags)
        return written

    def read(self, path: Path) -> tuple[ProbeIndex, str]:
        """Load a probe artifact.

        Returns:
            (ProbeIndex, method name recorded at build time)

        Raises:
            IoError: If the file cannot be read
            FormatError: On bad magic or truncated/trailing data
            ArtifactMismatchError: On an unsupported format version
        """
        path = Path(path)
        try:
            payload = path.read_bytes()
        except OSError as e:
            raise IoError(f"Cannot read {path}: {e.strerror or e}") from e

        if len(payload) < HEADER.size:
            raise FormatError(f"{path}: file too short for a QBNP header")
        magic, version, method_code, beta, k_act, k_csls, n_gallery, n_bank, flags = (
            HEADER.unpack_from(payload, 0)
        )
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise ArtifactMismatchError(
                f"{path}: artifact format version {version}, this build reads {FORMAT_VERSION}"
            )
        if method_code >= len(METHODS):
            raise FormatError(f"{path}: unknown method code {method_code}")

        reader = _Reader(payload, HEADER.size, path)
        denominators = reader.array(F64, n_gallery)
        log_denominators = reader.array(F64, n_gallery)
        csls_means = reader.array(F64, n_gallery) if flags & FLAG_CSLS else None
        (n_active,) = reader.unpack(COUNT)
        active = reader.array(U32, n_active).astype(np.int64)
        probe = None
        sorted_rows = None
        if flags & FLAG_PROBE:
            probe = reader.array(F64, n_gallery * n_bank).reshape(n_gallery, n_bank)
            sorted_rows = np.sort(probe, axis=1)
        reader.finish()

        index = ProbeIndex(
            gallery_size=n_gallery,
            querybank_size=n_bank,
            beta=beta,
            k_activation=k_act,
            K_csls=k_csls,
            is_denominators=denominators,
            is_log_denominators=log_denominators,
            csls_topk_mean=csls_means,
            activation_set=active,
            probe=probe,
            sorted_rows=sorted_rows,
        )
        return index, METHODS[method_code]


class _Reader:
    """Sequential cursor over an artifact payload with truncation checks."""

    def __init__(self, payload: bytes, offset: int, path: Path):
        self.payload = payload
        self.offset = offset
        self.path = path

    def _take(self, size: int) -> int:
        start = self.offset
        if start + size > len(self.payload):
            raise FormatError(f"{self.path}: truncated at byte {start}")
        self.offset += size
        return start

    def unpack(self, fmt: struct.Struct) -> tuple:
        return fmt.unpack_from(self.payload, self._take(fmt.size))

    def array(self, dtype: np.dtype, count: int) -> np.ndarray:
        start = self._take(count * dtype.itemsize)
        return np.frombuffer(self.payload, dtype=dtype, count=count, offset=start).copy()

    def finish(self) -> None:
        if self.offset != len(self.payload):
            raise FormatError(
                f"{self.path}: {len(self.payload) - self.offset} unexpected trailing bytes"
            )
