# SPDX-License-Identifier: MIT

from rich import box
from rich.console import Console
from rich.table import Table

from fcsynth.model.mixture import DatasetStats, MixtureConfig
from fcsynth.service.postprocess import irrelevance_ratio
from fcsynth.view.view.views.header import header


def mixture_plan_report(cfg: MixtureConfig) -> None:
    header("mixture")

    table = Table(box=box.SIMPLE)
    table.add_column("type")
    table.add_column("count", justify="right")
    table.add_row("single_turn", str(cfg["n_single_turn"]))
    table.add_row("multi_turn", str(cfg["n_multi_turn"]))
    table.add_row("irrelevance", str(cfg["n_irrelevance"]))

    console = Console()
    console.print(table)
    console.print(f"irrelevance ratio: [bold]{irrelevance_ratio(cfg):.1f}%[/bold]")


def _histogram_table(title: str, histogram: dict[int, int]) -> Table:
    table = Table(title=title, box=box.SIMPLE)
    table.add_column(title)
    table.add_column("instances", justify="right")
    for key, count in sorted(histogram.items()):
        table.add_row(str(key), str(count))
    return table


def stats_report(stats: DatasetStats) -> None:
    header("dataset statistics")

    counts = Table(box=box.SIMPLE)
    counts.add_column("type")
    counts.add_column("instances", justify="right")
    for data_type, count in sorted(stats["counts"].items()):
        counts.add_row(data_type, str(count))
    for subtype, count in sorted(stats["subtypes"].items()):
        counts.add_row(f"  {subtype}", str(count))
    counts.add_row("[bold]total[/bold]", f"[bold]{stats['total']}[/bold]")

    console = Console()
    console.print(counts)
    console.print(_histogram_table("turns", stats["turns"]))
    console.print(_histogram_table("function calls", stats["fcs"]))
