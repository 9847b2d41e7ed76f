"""Synthetic benchmark CLI command.

Generates a seeded anisotropic Gaussian embedding set, ranks it with and without the
configured normaliser and reports retrieval metrics and hubness for both.
"""

from pathlib import Path
from typing import Optional

import click

from src.datagen.experiment import prepare_dataset, run_on_dataset
from src.datagen.generator import SynthDataset
from src.evaluation.formatter import ResultFormatter
from src.models.config import RunManifest
from src.storage.csv_handler import CSVHandler
from src.storage.embedstore import save_embeddings
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

EXPORT_FILES = {
    "queries": "queries.qbn",
    "gallery": "gallery.qbn",
    "querybank": "querybank.qbn",
}
GROUND_TRUTH_FILE = "gt.csv"


def histogram_paths(out: Path) -> tuple[Path, Path]:
    """``report.json`` -> ``report.counts_before.csv``, ``report.counts_after.csv``."""
    stem = out.with_suffix("")
    return (
        stem.with_name(stem.name + ".counts_before.csv"),
        stem.with_name(stem.name + ".counts_after.csv"),
    )


def export_dataset(dataset: SynthDataset, directory: Path) -> None:
    """Write the generated matrices as QBN1 files plus ``gt.csv``."""
    for name, filename in EXPORT_FILES.items():
        save_embeddings(getattr(dataset, name), directory / filename)
    pairs = [
        (qid, dataset.gallery.ids[j])
        for qid, relevant in zip(dataset.queries.ids, dataset.gt.relevant)
        for j in sorted(relevant)
    ]
    CSVHandler().write_ground_truth(pairs, directory / GROUND_TRUTH_FILE)


@click.command()
@synth_options
@normaliser_options()
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Experiment report (JSON)",
)
@click.option(
    "--export-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Also write the generated embeddings and ground truth here",
)
@click.pass_context
@handle_errors
def synth(ctx: click.Context, out: Path, export_dir: Optional[Path], **params):
    """Run the before/after experiment on synthetic embeddings.

    The report holds R@1/5/10, MdR, GM, skewness, max_count and unretrieved
    under "before" and "after"; the sorted top-1 retrieval counts go to two
    CSV files next to it.
    """
    spec = spec_from_options(params)
    cfg = config_from_options(params)
    threads = ctx.obj["threads"]
    extra_random = params["extra_random"]
    hub_k = params["hub_k"]

    banner("Synthetic Hubness Experiment")
    show_config(
        cfg,
        {
            "Queries": f"{spec.n_queries:,}",
            "Gallery": f"{spec.n_gallery:,}",
            "Querybank": f"{spec.n_querybank:,}"
            + (f" + {extra_random:,} random" if extra_random else ""),
            "Dimension": spec.dim,
            "Correlation": spec.correlation,
            "Querybank Domain": spec.querybank_domain,
            "Random Seed": spec.seed,
        },
    )

    click.echo("Generating embeddings...")
    dataset = prepare_dataset(spec, extra_random)
    click.echo("  ✓ Generated")
    if export_dir is not None:
        export_dataset(dataset, export_dir)
        click.echo(f"  ✓ Exported to {export_dir}")
    click.echo("")

    click.echo("Ranking before and after normalisation...")
    result = run_on_dataset(
        dataset, spec, cfg, k=hub_k, threads=threads, extra_random=extra_random
    )
    click.echo("")

    click.echo(ResultFormatter.format_metrics(result.before.metrics, result.after.metrics))
    click.echo("")
    click.echo(ResultFormatter.format_hubness(result.before.hubness, result.after.hubness))
    click.echo("")

    before_csv, after_csv = histogram_paths(out)
    handler = CSVHandler()
    handler.write_counts(result.before.counts, before_csv)
    handler.write_counts(result.after.counts, after_csv)

    inputs = {}
    if export_dir is not None:
        inputs = {name: str(export_dir / filename) for name, filename in EXPORT_FILES.items()}
    manifest = RunManifest(
        command="synth",
        inputs=inputs,
        config=cfg,
        output=str(out),
        seed=spec.seed,
        extra={"spec": spec.to_dict(), "extra_random": extra_random, "k": hub_k},
    )
    write_report(out, result.to_dict(), manifest)

    status = "✓ reduced" if result.skewness_reduced else "✗ not reduced"
    click.echo(f"Skewness: {status}")
    click.echo(f"Report written to: {out}")
    click.echo(f"Retrieval counts written to: {before_csv}, {after_csv}")
