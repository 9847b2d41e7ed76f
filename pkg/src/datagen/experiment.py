"""Before/after querybank normalisation experiments on synthetic data.

``run_experiment`` ranks the same queries twice, once by raw cosine
similarity and once with the configured normaliser, and reports retrieval
metrics, hubness and the sorted top-1 retrieval counts for both. The sweeps
repeat the normalised half over a list of querybank sizes, inverse
temperatures or activation sizes while reusing one generated dataset and one
baseline.
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Sequence

from src.evaluation.hubness import DEFAULT_K, hubness_report, retrieval_counts
from src.evaluation.metrics import evaluate
from src.models.config import NormaliserConfig, SynthSpec
from src.models.errors import ArgumentError
from src.models.reports import HubnessReport, RetrievalMetrics
from src.normalise.pipeline import QBNormRetriever
from .generator import SynthDataset, generate, supplement_querybank

logger = logging.getLogger(__name__)

SWEEP_PARAMS = ("querybank-size", "beta", "k-activation")


@dataclass(frozen=True, eq=False)
class RunOutcome:
    """Metrics, hubness and top-1 retrieval counts of one set of rankings."""

    metrics: RetrievalMetrics
    hubness: HubnessReport
    counts: list[int]

    def to_dict(self) -> dict[str, Any]:
        out = self.metrics.to_dict()
        out.update(self.hubness.to_dict())
        return out


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """Paired baseline and normalised outcomes of one synthetic run."""

    spec: SynthSpec
    cfg: NormaliserConfig
    before: RunOutcome
    after: RunOutcome
    extra_random: int = 0

    @property
    def skewness_reduced(self) -> bool:
        return self.after.hubness.skewness < self.before.hubness.skewness

    def to_dict(self) -> dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "config": self.cfg.to_dict(),
            "seed": self.spec.seed,
            "extra_random": self.extra_random,
            "before": self.before.to_dict(),
            "after": self.after.to_dict(),
        }


def hubness_k(gallery_size: int, k: int = DEFAULT_K) -> int:
    """Occurrence neighbourhood clamped to the gallery size."""
    return min(k, gallery_size)


def evaluate_rankings_for(
    dataset: SynthDataset,
    cfg: NormaliserConfig,
    k: int = DEFAULT_K,
    threads: int = 1,
) -> RunOutcome:
    """Rank ``dataset.queries`` with ``cfg`` and score the rankings."""
    retriever = QBNormRetriever.from_querybank(
        dataset.gallery, dataset.querybank, cfg, threads=threads
    )
    rankings = retriever.rank(dataset.queries)
    gallery_size = dataset.gallery.n
    return RunOutcome(
        metrics=evaluate(rankings, dataset.gt),
        hubness=hubness_report(rankings, gallery_size, hubness_k(gallery_size, k)),
        counts=retrieval_counts(rankings, gallery_size),
    )


def run_on_dataset(
    dataset: SynthDataset,
    spec: SynthSpec,
    cfg: NormaliserConfig,
    k: int = DEFAULT_K,
    threads: int = 1,
    extra_random: int = 0,
) -> ExperimentResult:
    """Baseline versus ``cfg`` on an already generated dataset."""
    logger.info("Ranking baseline (raw cosine)")
    before = evaluate_rankings_for(dataset, cfg.replace(method="none"), k, threads)
    if cfg.method == "none":
        after = before
    else:
        logger.info("Ranking with %s (beta=%g)", cfg.method, cfg.beta)
        after = evaluate_rankings_for(dataset, cfg, k, threads)
    return ExperimentResult(
        spec=spec, cfg=cfg, before=before, after=after, extra_random=extra_random
    )


def prepare_dataset(spec: SynthSpec, extra_random: int = 0) -> SynthDataset:
    """Generate ``spec`` and optionally append random querybank vectors."""
    dataset = generate(spec)
    if extra_random:
        # Offset keeps the supplement stream apart from the generator stream
        bank = supplement_querybank(dataset.querybank, extra_random, seed=spec.seed + 1)
        dataset = replace(dataset, querybank=bank)
    return dataset


def run_experiment(
    spec: SynthSpec,
    cfg: NormaliserConfig,
    k: int = DEFAULT_K,
    threads: int = 1,
    extra_random: int = 0,
) -> ExperimentResult:
    """Generate ``spec`` and compare raw cosine retrieval with ``cfg``.

    Args:
        spec: Synthetic benchmark description
        cfg: Normaliser configuration for the "after" rankings
        k: Occurrence neighbourhood for the hubness reports (clamped to n_gallery)
        threads: Worker threads for ranking
        extra_random: Random querybank vectors appended before the probe is built

    Returns:
        ExperimentResult with before/after metrics, hubness and retrieval counts
    """
    dataset = prepare_dataset(spec, extra_random)
    return run_on_dataset(dataset, spec, cfg, k=k, threads=threads, extra_random=extra_random)


def _sweep_row(param: str, value: Any, outcome: RunOutcome) -> dict[str, Any]:
    row: dict[str, Any] = {param: value}
    row.update(outcome.metrics.to_dict())
    row["skewness"] = outcome.hubness.to_dict()["skewness"]
    row["max_count"] = outcome.hubness.max_count
    return row


def _sweep(
    spec: SynthSpec,
    configs: Sequence[tuple[Any, NormaliserConfig]],
    param: str,
    k: int,
    threads: int,
    extra_random: int,
) -> dict[str, Any]:
    dataset = prepare_dataset(spec, extra_random)
    baseline_cfg = configs[0][1].replace(method="none")
    baseline = evaluate_rankings_for(dataset, baseline_cfg, k, threads)

    rows = []
    for value, cfg in configs:
        logger.info("Sweep %s=%s", param, value)
        rows.append(_sweep_row(param, value, evaluate_rankings_for(dataset, cfg, k, threads)))
    return {
        "param": param,
        "spec": spec.to_dict(),
        "config": configs[0][1].to_dict(),
        "baseline": baseline.to_dict(),
        "rows": rows,
    }


def sweep_querybank_size(
    spec: SynthSpec,
    cfg: NormaliserConfig,
    sizes: Sequence[int],
    k: int = DEFAULT_K,
    threads: int = 1,
    extra_random: int = 0,
) -> dict[str, Any]:
    """Normalised retrieval for each querybank size (uniform subsampling).

    Sizes above the generated querybank use the whole querybank.

    Raises:
        ArgumentError: If ``sizes`` is empty or contains a value below 1
    """
    if not sizes:
        raise ArgumentError("Querybank-size sweep needs at least one size")
    configs = [(int(n), cfg.replace(querybank_size_cap=int(n))) for n in sizes]
    return _sweep(spec, configs, "querybank_size", k, threads, extra_random)


def sweep_beta(
    spec: SynthSpec,
    cfg: NormaliserConfig,
    betas: Sequence[float],
    k: int = DEFAULT_K,
    threads: int = 1,
    extra_random: int = 0,
) -> dict[str, Any]:
    """Normalised retrieval for each inverse temperature.

    Raises:
        ArgumentError: If ``betas`` is empty or contains a value <= 0
    """
    if not betas:
        raise ArgumentError("Beta sweep needs at least one value")
    configs = [(float(b), cfg.replace(beta=float(b))) for b in betas]
    return _sweep(spec, configs, "beta", k, threads, extra_random)


def sweep_k_activation(
    spec: SynthSpec,
    cfg: NormaliserConfig,
    ks: Sequence[int],
    k: int = DEFAULT_K,
    threads: int = 1,
    extra_random: int = 0,
) -> dict[str, Any]:
    """Normalised retrieval for each top-k used to build the dis activation set.

    Raises:
        ArgumentError: If ``ks`` is empty or contains a value below 1
    """
    if not ks:
        raise ArgumentError("Activation-k sweep needs at least one value")
    configs = [(int(n), cfg.replace(k_activation=int(n))) for n in ks]
    return _sweep(spec, configs, "k_activation", k, threads, extra_random)


def sweep(
    param: str,
    spec: SynthSpec,
    cfg: NormaliserConfig,
    values: Sequence[str],
    k: int = DEFAULT_K,
    threads: int = 1,
    extra_random: int = 0,
) -> dict[str, Any]:
    """Dispatch a sweep by its CLI parameter name; ``values`` are raw strings."""
    if param not in SWEEP_PARAMS:
        raise ArgumentError(f"Unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}")
    cast = float if param == "beta" else int
    try:
        parsed = [cast(v) for v in values]
    except ValueError as e:
        raise ArgumentError(f"Invalid {param} value in {list(values)}: {e}") from e

    if param == "querybank-size":
        return sweep_querybank_size(spec, cfg, parsed, k, threads, extra_random)
    if param == "k-activation":
        return sweep_k_activation(spec, cfg, parsed, k, threads, extra_random)
    return sweep_beta(spec, cfg, parsed, k, threads, extra_random)
