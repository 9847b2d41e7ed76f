"""Probe precomputation CLI command.

Builds the querybank probe index for a gallery once and stores it as a
``QBNP`` artifact that ``qbnorm rank --artifact`` reuses.
"""

from pathlib import Path

import click

from src.models.config import RunManifest
from src.normalise.probe import build_probe, subsample_querybank
from src.storage.probe_artifact import FORMAT_VERSION, ProbeArtifactHandler
from src.storage.report_writer import write_report
from .options import (
    banner,
    companion_path,
    config_from_options,
    format_option,
    handle_errors,
    load_matrix,
    normaliser_options,
    show_config,
)


@click.command()
@click.option(
    "--querybank",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Querybank embeddings",
)
@click.option(
    "--gallery",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Gallery embeddings",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Probe artifact to write",
)
@normaliser_options()
@format_option
@click.pass_context
@handle_errors
def precompute(ctx: click.Context, querybank: Path, gallery: Path, out: Path, fmt: str, **params):
    """Precompute the querybank probe index for a gallery.

    Stores the inverted-softmax denominators, the activation set, CSLS means
    and, for method gc only, the full probe matrix.
    """
    cfg = config_from_options(params)
    threads = ctx.obj["threads"]

    banner("Querybank Probe Precomputation")
    show_config(cfg, {"Threads": threads})

    click.echo("Loading embeddings...")
    bank = load_matrix(querybank, fmt, "querybank")
    items = load_matrix(gallery, fmt, "gallery")
    click.echo("")

    bank = subsample_querybank(bank, cfg.querybank_size_cap, cfg.querybank_seed)

    click.echo("Building probe index...")
    probe = build_probe(bank, items, cfg, threads=threads)
    click.echo(f"  ✓ Probe matrix: {probe.gallery_size:,} x {probe.querybank_size:,}")
    click.echo(f"  ✓ Activation set: {probe.activation_set.size:,} gallery items")
    if probe.log_space:
        click.echo("  ✓ Denominators stored in log space")
    click.echo("")

    ProbeArtifactHandler().write(probe, cfg, out)
    manifest = RunManifest(
        command="precompute",
        inputs={"querybank": str(querybank), "gallery": str(gallery)},
        config=cfg,
        output=str(out),
        seed=cfg.querybank_seed,
        extra={"format_version": FORMAT_VERSION},
    )
    write_report(
        companion_path(out),
        {
            "gallery_size": probe.gallery_size,
            "querybank_size": probe.querybank_size,
            "activation_set_size": int(probe.activation_set.size),
            "probe_matrix": probe.probe is not None,
        },
        manifest,
    )

    click.echo(f"Artifact written to: {out}")
    click.echo(f"Manifest written to: {companion_path(out)}")
