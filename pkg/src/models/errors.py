"""Exception hierarchy shared by storage, kernels, normalisers and the CLI.

The CLI maps every ``QBNormError`` to exit code 2 (bad input); anything
else escaping a command is reported as an internal error (exit code 1).
"""


class QBNormError(Exception):
    """Base class for all input and validation failures."""


class FormatError(QBNormError):
    """Raised when a file does not conform to its declared format."""


class ValidationError(QBNormError, ValueError):
    """Raised when data violates a domain invariant (duplicate ids, NaN, ...)."""


class ZeroVectorError(ValidationError):
    """Raised when a zero vector makes cosine similarity undefined."""


class ShapeError(QBNormError, ValueError):
    """Raised on dimension or length mismatches."""


class ArgumentError(QBNormError, ValueError):
    """Raised when a numeric argument is out of its valid range."""


class IoError(QBNormError, OSError):
    """Raised when a file cannot be read or written."""


class ArtifactMismatchError(QBNormError):
    """Raised when a probe artifact does not match the requested run."""
