"""Sweep CLI command: querybank size, inverse temperature or activation k."""

from pathlib import Path

import click

from src.datagen.experiment import SWEEP_PARAMS, sweep
from src.evaluation.formatter import ResultFormatter
from src.models.config import RunManifest
from src.models.errors import ArgumentError
from src.storage.report_writer import write_report
from .options import (
    banner,
    config_from_options,
    handle_errors,
    normaliser_options,
    show_config,
    spec_from_options,
    synth_options,
)


@click.command(name="sweep")
@click.option(
    "--param",
    type=click.Choice(SWEEP_PARAMS),
    required=True,
    help="Parameter to vary",
)
@click.option(
    "--values",
    required=True,
    help="Comma-separated values, e.g. 100,500,2000",
)
@synth_options
@normaliser_options()
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Sweep report (JSON)",
)
@click.pass_context
@handle_errors
def sweep_cmd(ctx: click.Context, param: str, values: str, out: Path, **params):
    """Repeat the synthetic experiment over querybank sizes, betas or activation k.

    One dataset and one baseline are shared by every row.
    """
    spec = spec_from_options(params)
    cfg = config_from_options(params)
    threads = ctx.obj["threads"]
    parsed = [v.strip() for v in values.split(",") if v.strip()]
    if not parsed:
        raise ArgumentError("--values needs at least one value")

    banner(f"Sweep: {param}")
    show_config(cfg, {"Values": ", ".join(parsed), "Random Seed": spec.seed})

    report = sweep(
        param,
        spec,
        cfg,
        parsed,
        k=params["hub_k"],
        threads=threads,
        extra_random=params["extra_random"],
    )

    click.echo(ResultFormatter.format_sweep(report["rows"], param))
    click.echo("")

    manifest = RunManifest(
        command="sweep",
        config=cfg,
        output=str(out),
        seed=spec.seed,
        extra={"param": param, "values": parsed},
    )
    write_report(out, report, manifest)
    click.echo(f"Report written to: {out}")
