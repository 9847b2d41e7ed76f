"""Hubness CLI command: k-occurrence skewness of a rankings file."""

from pathlib import Path

import click

from src.evaluation.formatter import ResultFormatter
from src.evaluation.hubness import DEFAULT_K, occurrences_from_ids, report_from_occurrences
from src.models.config import RunManifest
from src.storage.rankings_handler import RankingsHandler
from src.storage.report_writer import write_report
from .options import banner, handle_errors


@click.command(name="hubness")
@click.option(
    "--rankings",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Rankings file from 'qbnorm rank'",
)
@click.option(
    "--gallery-size",
    type=click.IntRange(min=1),
    required=True,
    help="Number of gallery items the rankings were drawn from",
)
@click.option(
    "--k",
    type=click.IntRange(min=1),
    default=DEFAULT_K,
    show_default=True,
    help="Occurrence neighbourhood size",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Hubness report (JSON)",
)
@handle_errors
def hubness_cmd(rankings: Path, gallery_size: int, k: int, out: Path):
    """Report the k-occurrence distribution's skewness, largest count and anti-hubs.

    Gallery items that never appear in any list count as unretrieved; k must
    not exceed the gallery size or the written top-M.
    """
    banner(f"Hubness Report (k={k})")

    lists = RankingsHandler().read(rankings)
    click.echo(f"  ✓ Rankings: {len(lists):,} queries ({rankings})")
    click.echo("")

    n_k, ids = occurrences_from_ids([item.gallery_ids for item in lists], k, gallery_size)
    report = report_from_occurrences(n_k, k)

    click.echo(ResultFormatter.format_hubness(report, labels=ids))
    click.echo("")

    body = report.to_dict()
    body["top_hubs"] = [ids[j] for j in report.top_hubs]
    body["n_queries"] = len(lists)
    manifest = RunManifest(
        command="hubness",
        inputs={"rankings": str(rankings)},
        output=str(out),
        extra={"gallery_size": gallery_size},
    )
    write_report(out, body, manifest)
    click.echo(f"Report written to: {out}")
