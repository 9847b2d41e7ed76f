"""Result formatting and presentation utilities.

This module provides formatters for metrics, hubness reports, sweeps and
latency profiles, making them suitable for CLI display.
"""

from typing import Any, Dict, Iterable, Optional, Sequence

import pandas as pd
from tabulate import tabulate

from src.models.reports import HubnessReport, RetrievalMetrics


class ResultFormatter:
    """Formatter for evaluation output.

    Every method returns a plain string; the CLI decides where it goes.
    """

    @staticmethod
    def format_dataframe(
        df: pd.DataFrame,
        max_rows: int = 20,
        table_format: str = "grid",
        floatfmt: str = ".4f",
    ) -> str:
        """Format DataFrame as ASCII table.

        Args:
            df: DataFrame to format
            max_rows: Maximum rows to display
            table_format: Table format (grid, simple, plain, etc.)
            floatfmt: Format applied to float columns

        Returns:
            Formatted table string
        """
        if df.empty:
            return "No results"

        table = tabulate(
            df.head(max_rows),
            headers="keys",
            tablefmt=table_format,
            showindex=False,
            floatfmt=floatfmt,
        )

        if len(df) > max_rows:
            return table + f"\n\n[Showing {max_rows} of {len(df)} rows]"
        return table

    @staticmethod
    def format_execution_time(time_ms: float) -> str:
        """Format execution time in human-readable format.

        Args:
            time_ms: Execution time in milliseconds

        Returns:
            Formatted time string
        """
        if time_ms < 1:
            return f"{time_ms * 1000:.2f} μs"
        elif time_ms < 1000:
            return f"{time_ms:.2f} ms"
        else:
            return f"{time_ms / 1000:.2f} s"

    @staticmethod
    def metrics_frame(
        before: RetrievalMetrics,
        after: Optional[RetrievalMetrics] = None,
    ) -> pd.DataFrame:
        """One row per metric; a ``change`` column when both sides are given."""
        left = before.to_dict()
        frame = pd.DataFrame({"metric": list(left), "before": list(left.values())})
        if after is not None:
            right = after.to_dict()
            frame["after"] = [right.get(name) for name in left]
            frame["change"] = frame["after"] - frame["before"]
        return frame

    @staticmethod
    def format_metrics(
        before: RetrievalMetrics,
        after: Optional[RetrievalMetrics] = None,
        title: str = "Retrieval Metrics",
    ) -> str:
        """Format retrieval metrics, optionally before and after normalisation."""
        output = [title, "=" * 80, ""]
        frame = ResultFormatter.metrics_frame(before, after)
        if after is None:
            frame = frame.rename(columns={"before": "value"})
        output.append(ResultFormatter.format_dataframe(frame, table_format="simple"))
        output.append("")
        output.append(f"Queries: {before.n_queries:,}")
        return "\n".join(output)

    @staticmethod
    def format_hubness(
        before: HubnessReport,
        after: Optional[HubnessReport] = None,
        labels: Optional[Sequence[str]] = None,
    ) -> str:
        """Format hubness reports.

        Args:
            before: Baseline (or only) report
            after: Report after normalisation, if any
            labels: Gallery ids to show instead of hub indices

        Returns:
            Formatted hubness summary
        """
        output = [f"Hubness (k={before.k})", "=" * 80, ""]

        rows = [
            ["skewness", before.skewness],
            ["max_count", before.max_count],
            ["unretrieved", before.unretrieved],
        ]
        headers = ["statistic", "value"]
        if after is not None:
            headers = ["statistic", "before", "after"]
            for row, value in zip(rows, (after.skewness, after.max_count, after.unretrieved)):
                row.append(value)
        output.append(tabulate(rows, headers=headers, tablefmt="simple", floatfmt=".4f"))
        output.append("")

        def name(j: int) -> str:
            return labels[j] if labels is not None else str(j)

        hubs = ", ".join(name(j) for j in before.top_hubs) or "none"
        output.append(f"Top hubs: {hubs}")
        if after is not None:
            hubs_after = ", ".join(name(j) for j in after.top_hubs) or "none"
            output.append(f"Top hubs after: {hubs_after}")
        return "\n".join(output)

    @staticmethod
    def format_sweep(rows: Iterable[Dict[str, Any]], param: str) -> str:
        """Format sweep rows as a table keyed by the swept parameter."""
        frame = pd.DataFrame(list(rows))
        output = [f"Sweep over {param}", "=" * 80, ""]
        output.append(ResultFormatter.format_dataframe(frame, max_rows=100))
        return "\n".join(output)

    @staticmethod
    def format_profile(profile: Dict[str, Any]) -> str:
        """Format one normaliser latency profile.

        Args:
            profile: ``NormaliserProfile.to_dict()`` output

        Returns:
            Formatted benchmark report
        """
        fmt = ResultFormatter.format_execution_time
        output = []

        output.append(f"Benchmark: {profile['method']}")
        output.append("=" * 80)
        output.append("")

        output.append("Performance Metrics:")
        output.append(f"  Gallery Size: {profile['gallery_size']:,}")
        output.append(f"  Querybank Size: {profile['querybank_size']:,}")
        output.append(f"  Queries: {profile['num_queries']}")
        output.append(f"  Median Normalise Time: {fmt(profile['median_normalise_ms'])}")
        output.append(f"  P95 Normalise Time: {fmt(profile['p95_normalise_ms'])}")
        output.append(f"  Median Argsort Time: {fmt(profile['median_argsort_ms'])}")
        output.append(f"  Overhead Ratio: {profile['overhead_ratio']:.2f}x")

        return "\n".join(output)
