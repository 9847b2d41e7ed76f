"""Per-query latency benchmark CLI command.

Times each normaliser against a plain argsort of the same similarity
vector on a synthetic gallery and checks the overhead ratio.
"""

from pathlib import Path
from typing import Optional

import click

from src.evaluation.formatter import ResultFormatter
from src.evaluation.profiler import DEFAULT_MAX_OVERHEAD, NormaliserProfiler
from src.models.config import DEFAULT_BETA, METHODS
from src.storage.report_writer import write_report
from .options import banner, handle_errors


@click.command()
@click.option("--gallery-size", type=click.IntRange(min=1), default=100_000, show_default=True)
@click.option("--querybank-size", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--dim", type=click.IntRange(min=1), default=32, show_default=True)
@click.option("--num-queries", type=click.IntRange(min=1), default=100, show_default=True)
@click.option(
    "--methods",
    default="dis",
    show_default=True,
    help=f"Comma-separated subset of {', '.join(m for m in METHODS if m != 'none')}",
)
@click.option("--beta", type=float, default=DEFAULT_BETA, show_default=True)
@click.option(
    "--max-overhead",
    type=float,
    default=DEFAULT_MAX_OVERHEAD,
    show_default=True,
    help="Allowed median normaliser time as a multiple of argsort",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--output-json",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Export results to JSON file",
)
@handle_errors
def bench(
    gallery_size: int,
    querybank_size: int,
    dim: int,
    num_queries: int,
    methods: str,
    beta: float,
    max_overhead: float,
    seed: int,
    output_json: Optional[Path],
):
    """Benchmark per-query normaliser cost against argsort.

    Timings vary between runs, so unlike the other reports the JSON export
    is not byte-reproducible.
    """
    names = [m.strip().lower() for m in methods.split(",") if m.strip()]

    banner("Normaliser Latency Benchmark")
    click.echo("Configuration:")
    click.echo(f"  Gallery Size: {gallery_size:,}")
    click.echo(f"  Querybank Size: {querybank_size:,}")
    click.echo(f"  Dimension: {dim}")
    click.echo(f"  Queries: {num_queries}")
    click.echo(f"  Methods: {', '.join(names)}")
    click.echo("")

    click.echo("Building synthetic gallery...")
    profiler = NormaliserProfiler(gallery_size, querybank_size, dim, seed=seed)
    click.echo("")

    profiles = profiler.compare_methods(names, num_queries=num_queries, beta=beta)

    all_pass = True
    for method, profile in profiles.items():
        click.echo(ResultFormatter.format_profile(profile.to_dict()))
        ok = profile.meets_contract(max_overhead)
        all_pass = all_pass and ok
        click.echo(f"  Contract ({max_overhead:g}x argsort): {'✓ PASS' if ok else '✗ FAIL'}")
        click.echo("")

    click.echo("=" * 80)
    click.echo(f"Overall: {'✓ PASS' if all_pass else '✗ FAIL'}")

    if output_json:
        write_report(
            output_json,
            {
                "max_overhead": max_overhead,
                "profiles": {m: p.to_dict() for m, p in profiles.items()},
                "passed": all_pass,
            },
        )
        click.echo(f"Results exported to: {output_json}")
