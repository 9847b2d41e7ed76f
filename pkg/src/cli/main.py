"""``qbnorm`` command group.

Registers the subcommands and the global ``--verbose`` and ``--threads``
options. Library code only logs; ``--verbose`` turns that output on.
"""

import logging

import click

from src.models.config import THREADS_ENV_VAR, default_threads
from .bench import bench
from .evaluate import evaluate_cmd
from .hubness import hubness_cmd
from .precompute import precompute
from .rank import rank
from .sweep import sweep_cmd
from .synth import synth


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging")
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    envvar=THREADS_ENV_VAR,
    default=None,
    help=f"Worker threads (default: CPU count, capped; env {THREADS_ENV_VAR})",
)
@click.pass_context
def cli(ctx: click.Context, verbose: bool, threads: int | None):
    """Querybank normalisation for cross-modal retrieval.

    Precompute querybank probes, rank galleries with GC, CSLS, IS or DIS,
    and evaluate retrieval quality and hubness.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj["threads"] = threads if threads is not None else default_threads()
    ctx.obj["verbose"] = verbose


cli.add_command(precompute)
cli.add_command(rank)
cli.add_command(evaluate_cmd)
cli.add_command(hubness_cmd)
cli.add_command(synth)
cli.add_command(sweep_cmd)
cli.add_command(bench)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
