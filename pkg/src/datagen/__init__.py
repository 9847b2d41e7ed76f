"""Synthetic hubness benchmark.

This module provides a seeded anisotropic Gaussian embedding generator and the
before/after normalisation experiments run on it.
"""

from .generator import (
    SynthDataset,
    anisotropic_unit_rows,
    gaussian_unit_rows,
    generate,
    noisy_copies,
    select_low_coverage,
    supplement_querybank,
)
from .experiment import (
    ExperimentResult,
    RunOutcome,
    run_experiment,
    run_on_dataset,
    sweep,
    sweep_beta,
    sweep_k_activation,
    sweep_querybank_size,
)

__all__ = [
    "ExperimentResult",
    "RunOutcome",
    "SynthDataset",
    "anisotropic_unit_rows",
    "gaussian_unit_rows",
    "generate",
    "noisy_copies",
    "run_experiment",
    "run_on_dataset",
    "select_low_coverage",
    "supplement_querybank",
    "sweep",
    "sweep_beta",
    "sweep_k_activation",
    "sweep_querybank_size",
]
