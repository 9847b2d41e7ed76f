"""Ranking CLI command.

Ranks a gallery for every query with querybank normalisation and writes the
top-M gallery ids per query as JSON lines.
"""

from pathlib import Path
from typing import Optional

import click

from src.models.config import RunManifest
from src.models.errors import ArgumentError, ArtifactMismatchError, ShapeError
from src.normalise.pipeline import QBNormRetriever
from src.storage.probe_artifact import ProbeArtifactHandler
from src.storage.rankings_handler import DEFAULT_TOPK_OUTPUT, RankingsHandler, ranked_lists
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
    "--queries",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Query embeddings",
)
@click.option(
    "--gallery",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Gallery embeddings",
)
@click.option(
    "--artifact",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Prebuilt probe artifact from 'qbnorm precompute'",
)
@click.option(
    "--querybank",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Querybank embeddings (probe is built on the fly)",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Rankings file (JSON lines)",
)
@click.option(
    "--topk-output",
    type=click.IntRange(min=1),
    default=DEFAULT_TOPK_OUTPUT,
    show_default=True,
    help="Gallery ids written per query",
)
@normaliser_options()
@format_option
@click.pass_context
@handle_errors
def rank(
    ctx: click.Context,
    queries: Path,
    gallery: Path,
    artifact: Optional[Path],
    querybank: Optional[Path],
    out: Path,
    topk_output: int,
    fmt: str,
    **params,
):
    """Rank the gallery for every query.

    Needs either --artifact or --querybank unless --method none. An artifact
    built with a different beta (or lacking what the method needs) is
    rejected.
    """
    cfg = config_from_options(params)
    threads = ctx.obj["threads"]

    if artifact is not None and querybank is not None:
        raise ArgumentError("Pass either --artifact or --querybank, not both")
    if cfg.method != "none" and artifact is None and querybank is None:
        raise ArgumentError(f"Method {cfg.method!r} needs --artifact or --querybank")

    banner("Querybank-Normalised Ranking")
    show_config(cfg, {"Top-M": topk_output, "Threads": threads})

    click.echo("Loading embeddings...")
    query_matrix = load_matrix(queries, fmt, "queries")
    gallery_matrix = load_matrix(gallery, fmt, "gallery")
    if query_matrix.d != gallery_matrix.d:
        raise ShapeError(
            f"{queries} has dimension {query_matrix.d}, {gallery} has {gallery_matrix.d}"
        )

    inputs = {"queries": str(queries), "gallery": str(gallery)}
    if cfg.method == "none":
        retriever = QBNormRetriever(gallery_matrix, cfg, threads=threads)
    elif artifact is not None:
        probe, built_for = ProbeArtifactHandler().read(artifact)
        click.echo(f"  ✓ artifact: {probe.gallery_size:,} x {probe.querybank_size:,} ({artifact})")
        try:
            retriever = QBNormRetriever(gallery_matrix, cfg, probe=probe, threads=threads)
        except ArtifactMismatchError as e:
            raise ArtifactMismatchError(f"{artifact} (built for {built_for}): {e}") from e
        inputs["artifact"] = str(artifact)
    else:
        bank = load_matrix(querybank, fmt, "querybank")
        retriever = QBNormRetriever.from_querybank(gallery_matrix, bank, cfg, threads=threads)
        inputs["querybank"] = str(querybank)
    click.echo("")

    click.echo("Ranking...")
    rankings = retriever.rank(query_matrix)
    lists = ranked_lists(query_matrix.ids, gallery_matrix.ids, rankings, topk_output)
    RankingsHandler().write(lists, out)
    click.echo(f"  ✓ {len(lists):,} queries ranked")
    click.echo("")

    manifest = RunManifest(
        command="rank",
        inputs=inputs,
        config=cfg,
        output=str(out),
        seed=cfg.querybank_seed,
        extra={"topk_output": topk_output},
    )
    # Rankings stay pure JSON lines; provenance goes next to them
    write_report(companion_path(out), {"queries": query_matrix.n}, manifest)

    click.echo(f"Rankings written to: {out}")
