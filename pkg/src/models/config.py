"""Run configuration models.

``NormaliserConfig`` selects the similarity normaliser and its
hyperparameters, ``SynthSpec`` describes a synthetic benchmark and
``RunManifest`` is echoed into every report for provenance.
"""

import os
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from .errors import ArgumentError

METHODS = ("none", "gc", "csls", "is", "dis")

# Inverse temperature that worked best for the inverted softmax
DEFAULT_BETA = 20.0
DEFAULT_K_ACTIVATION = 1
DEFAULT_K_CSLS = 10
DEFAULT_QUERYBANK_SEED = 0

# Where synthetic querybanks come from: the query distribution, a subspace the
# gallery barely occupies, or the in-domain candidates with the lowest coverage
QUERYBANK_DOMAINS = ("in", "far", "adversarial")

# Upper bound for the default worker count
MAX_DEFAULT_THREADS = 8
THREADS_ENV_VAR = "QBNORM_THREADS"


@dataclass(frozen=True)
class NormaliserConfig:
    """Similarity normaliser selection and hyperparameters.

    Attributes:
        method: One of none, gc, csls, is, dis
        beta: Inverse temperature for is/dis (must be > 0)
        k_activation: Top-k per querybank item forming the dis activation set
        K_csls: Neighbourhood size for csls
        querybank_size_cap: Optional cap; larger querybanks are uniformly subsampled
        querybank_seed: Seed for the subsampling
    """

    method: str = "dis"
    beta: float = DEFAULT_BETA
    k_activation: int = DEFAULT_K_ACTIVATION
    K_csls: int = DEFAULT_K_CSLS
    querybank_size_cap: Optional[int] = None
    querybank_seed: int = DEFAULT_QUERYBANK_SEED

    def __post_init__(self):
        method = str(self.method).lower()
        if method not in METHODS:
            raise ArgumentError(f"Unknown method {self.method!r}; expected one of {METHODS}")
        object.__setattr__(self, "method", method)

        if not self.beta > 0:
            raise ArgumentError(f"beta must be > 0, got {self.beta}")
        if self.k_activation < 1:
            raise ArgumentError(f"k_activation must be >= 1, got {self.k_activation}")
        if self.K_csls < 1:
            raise ArgumentError(f"K_csls must be >= 1, got {self.K_csls}")
        if self.querybank_size_cap is not None and self.querybank_size_cap < 1:
            raise ArgumentError(
                f"querybank_size_cap must be >= 1, got {self.querybank_size_cap}"
            )
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def needs_probe_matrix(self) -> bool:
        """Only GC needs the full probe matrix at query time."""
        return self.method == "gc"

    def replace(self, **changes: Any) -> "NormaliserConfig":
        values = asdict(self)
        values.update(changes)
        return NormaliserConfig(**values)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NormaliserConfig":
        return cls(**data)


@dataclass(frozen=True)
class SynthSpec:
    """Synthetic benchmark description.

    Query ``i`` is a noisy copy of gallery item ``i mod n_gallery``;
    ``correlation`` in [0, 1] controls how strongly it follows that item.
    ``querybank_domain`` picks the querybank source (see ``QUERYBANK_DOMAINS``).
    """

    n_queries: int = 2000
    n_gallery: int = 2000
    n_querybank: int = 2000
    dim: int = 512
    seed: int = 1
    correlation: float = 0.7
    querybank_domain: str = "in"

    def __post_init__(self):
        for name in ("n_queries", "n_gallery", "n_querybank", "dim"):
            if getattr(self, name) < 1:
                raise ArgumentError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0.0 <= self.correlation <= 1.0:
            raise ArgumentError(f"correlation must be in [0, 1], got {self.correlation}")
        domain = str(self.querybank_domain).lower()
        if domain not in QUERYBANK_DOMAINS:
            raise ArgumentError(
                f"Unknown querybank domain {self.querybank_domain!r}; "
                f"expected one of {QUERYBANK_DOMAINS}"
            )
        object.__setattr__(self, "querybank_domain", domain)
        if self.seed < 0:
            raise ArgumentError(f"seed must be non-negative, got {self.seed}")

    def ground_truth_index(self, query: int) -> int:
        return query % self.n_gallery

    def replace(self, **changes: Any) -> "SynthSpec":
        values = asdict(self)
        values.update(changes)
        return SynthSpec(**values)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class RunManifest:
    """Provenance record embedded in every report a command writes."""

    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    config: Optional[NormaliserConfig] = None
    output: Optional[str] = None
    seed: Optional[int] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "command": self.command,
            "inputs": dict(self.inputs),
            "output": self.output,
            "seed": self.seed,
        }
        if self.config is not None:
            out["config"] = self.config.to_dict()
        if self.extra:
            out.update(self.extra)
        return out


def default_threads() -> int:
    """Worker count from ``QBNORM_THREADS`` or the CPU count (capped)."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ArgumentError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
        if value < 1:
            raise ArgumentError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
        return value
    return min(os.cpu_count() or 1, MAX_DEFAULT_THREADS)
