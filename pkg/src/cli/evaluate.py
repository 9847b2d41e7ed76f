"""Evaluation CLI command: R@K, median rank and their geometric mean."""

from pathlib import Path

import click

from src.evaluation.formatter import ResultFormatter
from src.evaluation.metrics import DEFAULT_KS, best_ranks_from_ids, metrics_from_ranks
from src.models.config import RunManifest
from src.models.errors import ArgumentError
from src.storage.csv_handler import CSVHandler
from src.storage.rankings_handler import RankingsHandler
from src.storage.report_writer import write_report
from .options import banner, handle_errors


def parse_ks(raw: str) -> list[int]:
    try:
        ks = sorted({int(v) for v in raw.split(",") if v.strip()})
    except ValueError as e:
        raise ArgumentError(f"--ks must be comma-separated integers, got {raw!r}") from e
    if not ks or ks[0] < 1:
        raise ArgumentError(f"--ks values must be >= 1, got {raw!r}")
    return ks


@click.command(name="eval")
@click.option(
    "--rankings",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Rankings file from 'qbnorm rank'",
)
@click.option(
    "--gt",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Ground truth CSV (query_id,gallery_id)",
)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Metrics report (JSON)",
)
@click.option(
    "--ks",
    default=",".join(str(k) for k in DEFAULT_KS),
    show_default=True,
    help="Recall cut-offs; 1, 5 and 10 are always reported",
)
@handle_errors
def evaluate_cmd(rankings: Path, gt: Path, out: Path, ks: str):
    """Compute recall at K, median rank and GM of R@{1,5,10}.

    Every query id in the rankings must appear in the ground truth. Queries
    whose relevant items fall outside the written top-M count as rank M+1.
    """
    cutoffs = parse_ks(ks)

    banner("Retrieval Evaluation")

    lists = RankingsHandler().read(rankings)
    relevant = CSVHandler().read_ground_truth(gt)
    click.echo(f"  ✓ Rankings: {len(lists):,} queries ({rankings})")
    click.echo(f"  ✓ Ground truth: {len(relevant):,} queries ({gt})")
    click.echo("")
    if not lists:
        raise ArgumentError(f"{rankings} contains no rankings")

    ranks, censored = best_ranks_from_ids(
        {item.query_id: item.gallery_ids for item in lists}, relevant
    )
    metrics = metrics_from_ranks(ranks, cutoffs)

    click.echo(ResultFormatter.format_metrics(metrics))
    if censored:
        click.echo(f"Censored queries (rank M+1): {censored:,}")
    click.echo("")

    body = metrics.to_dict()
    body["n_queries"] = metrics.n_queries
    body["censored"] = censored
    manifest = RunManifest(
        command="eval",
        inputs={"rankings": str(rankings), "gt": str(gt)},
        output=str(out),
        extra={"ks": cutoffs},
    )
    write_report(out, body, manifest)
    click.echo(f"Report written to: {out}")
