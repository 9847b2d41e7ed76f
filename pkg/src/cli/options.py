"""Shared CLI options, configuration assembly and error handling."""

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Optional

import click

from src.models.config import (
    DEFAULT_BETA,
    DEFAULT_K_ACTIVATION,
    DEFAULT_K_CSLS,
    DEFAULT_QUERYBANK_SEED,
    METHODS,
    QUERYBANK_DOMAINS,
    NormaliserConfig,
    SynthSpec,
)
from src.models.embeddings import EmbeddingMatrix
from src.models.errors import QBNormError
from src.storage.embedstore import FORMATS, load_embeddings

logger = logging.getLogger(__name__)

# Exit codes
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 1

_SYNTH_DEFAULTS = SynthSpec()


def normaliser_options(default_method: str = "dis") -> Callable:
    """Attach ``--method``, ``--beta``, ``--k-activation``, ``--K-csls`` and subsampling flags."""

    def decorator(f: Callable) -> Callable:
        options = [
            click.option(
                "--method",
                type=click.Choice(METHODS, case_sensitive=False),
                default=default_method,
                show_default=True,
                help="Similarity normaliser",
            ),
            click.option(
                "--beta",
                type=float,
                default=DEFAULT_BETA,
                show_default=True,
                help="Inverse temperature for is/dis",
            ),
            click.option(
                "--k-activation",
                type=int,
                default=DEFAULT_K_ACTIVATION,
                show_default=True,
                help="Top-k per querybank item forming the dis activation set",
            ),
            click.option(
                "--K-csls",
                "K_csls",
                type=int,
                default=DEFAULT_K_CSLS,
                show_default=True,
                help="Neighbourhood size for csls",
            ),
            click.option(
                "--querybank-size-cap",
                type=int,
                default=None,
                help="Uniformly subsample larger querybanks to this size",
            ),
            click.option(
                "--querybank-seed",
                type=int,
                default=DEFAULT_QUERYBANK_SEED,
                show_default=True,
                help="Seed for querybank subsampling",
            ),
        ]
        for option in reversed(options):
            f = option(f)
        return f

    return decorator


def format_option(f: Callable) -> Callable:
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(FORMATS, case_sensitive=False),
        default="binary",
        show_default=True,
        help="Embedding file format",
    )(f)


def synth_options(f: Callable) -> Callable:
    """Attach the synthetic benchmark flags (``--seed`` included)."""
    options = [
        click.option("--n-queries", type=int, default=_SYNTH_DEFAULTS.n_queries, show_default=True),
        click.option("--n-gallery", type=int, default=_SYNTH_DEFAULTS.n_gallery, show_default=True),
        click.option(
            "--n-querybank", type=int, default=_SYNTH_DEFAULTS.n_querybank, show_default=True
        ),
        click.option("--dim", type=int, default=_SYNTH_DEFAULTS.dim, show_default=True),
        click.option(
            "--correlation",
            type=float,
            default=_SYNTH_DEFAULTS.correlation,
            show_default=True,
            help="Query/ground-truth pairing strength in [0, 1]",
        ),
        click.option(
            "--querybank-domain",
            type=click.Choice(QUERYBANK_DOMAINS, case_sensitive=False),
            default=_SYNTH_DEFAULTS.querybank_domain,
            show_default=True,
            help="Querybank source: query distribution, far subspace or lowest coverage",
        ),
        click.option(
            "--seed",
            type=int,
            default=_SYNTH_DEFAULTS.seed,
            show_default=True,
            help="Random seed for reproducibility",
        ),
        click.option(
            "--extra-random",
            type=int,
            default=0,
            show_default=True,
            help="Random query-modality vectors appended to the querybank",
        ),
        click.option(
            "--k",
            "hub_k",
            type=int,
            default=10,
            show_default=True,
            help="Occurrence neighbourhood for the hubness statistics",
        ),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def config_from_options(params: dict[str, Any]) -> NormaliserConfig:
    return NormaliserConfig(
        method=params["method"],
        beta=params["beta"],
        k_activation=params["k_activation"],
        K_csls=params["K_csls"],
        querybank_size_cap=params["querybank_size_cap"],
        querybank_seed=params["querybank_seed"],
    )


def spec_from_options(params: dict[str, Any]) -> SynthSpec:
    return SynthSpec(
        n_queries=params["n_queries"],
        n_gallery=params["n_gallery"],
        n_querybank=params["n_querybank"],
        dim=params["dim"],
        seed=params["seed"],
        correlation=params["correlation"],
        querybank_domain=params["querybank_domain"],
    )


def load_matrix(path: Path, fmt: str, label: str) -> EmbeddingMatrix:
    matrix = load_embeddings(path, fmt)
    click.echo(f"  ✓ {label}: {matrix.n:,} x {matrix.d} ({path})")
    return matrix


def banner(title: str) -> None:
    click.echo("=" * 80)
    click.echo(title)
    click.echo("=" * 80)
    click.echo("")


def show_config(cfg: NormaliserConfig, extra: Optional[dict[str, Any]] = None) -> None:
    click.echo("Configuration:")
    click.echo(f"  Method: {cfg.method.upper()}")
    if cfg.method in ("is", "dis"):
        click.echo(f"  Beta: {cfg.beta:g}")
    if cfg.method == "dis":
        click.echo(f"  Activation k: {cfg.k_activation}")
    if cfg.method == "csls":
        click.echo(f"  CSLS K: {cfg.K_csls}")
    if cfg.querybank_size_cap is not None:
        click.echo(f"  Querybank Cap: {cfg.querybank_size_cap:,} (seed {cfg.querybank_seed})")
    for name, value in (extra or {}).items():
        click.echo(f"  {name}: {value}")
    click.echo("")


def handle_errors(f: Callable) -> Callable:
    """Map library errors to exit code 2 and anything unexpected to 1."""

    @functools.wraps(f)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        ctx = click.get_current_context()
        try:
            return f(*args, **kwargs)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except QBNormError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_INPUT_ERROR)
        except Exception as e:
            logger.debug("Unhandled error", exc_info=True)
            click.echo(f"internal error: {type(e).__name__}: {e}", err=True)
            ctx.exit(EXIT_INTERNAL_ERROR)

    return wrapper


def companion_path(out: Path) -> Path:
    """Manifest written next to a non-JSON output: ``probe.qbnp`` -> ``probe.qbnp.json``."""
    return out.with_name(out.name + ".json")
