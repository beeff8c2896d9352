# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Optional

from rich import box
from rich.console import Console
from rich.table import Table

from fcsynth.model.dependency_graph import GraphSet
from fcsynth.view.view.views.header import header


def stage_summary_report(
    stage: str,
    out_path: Path,
    count: int,
    dropped: Optional[dict[str, int]] = None,
) -> None:
    header(stage)

    table = Table(box=box.SIMPLE)
    table.add_column("output")
    table.add_column("records", justify="right")
    table.add_row(str(out_path), str(count))
    for reason, n in sorted((dropped or {}).items()):
        table.add_row(f"[red]dropped[/red] {reason}", str(n))

    console = Console()
    console.print(table)


def graph_report(graphs: GraphSet, out_path: Path) -> None:
    header("dependency graphs")

    edges = sum(len(graph["edges"]) for graph in graphs.values())
    flagged = sorted(target for target, graph in graphs.items() if graph["flagged"])
    isolated = sum(1 for graph in graphs.values() if not graph["edges"])

    table = Table(box=box.SIMPLE)
    table.add_column("output")
    table.add_column("targets", justify="right")
    table.add_column("edges", justify="right")
    table.add_column("no edges", justify="right")
    table.add_column("flagged", justify="right")
    table.add_row(str(out_path), str(len(graphs)), str(edges), str(isolated), str(len(flagged)))

    console = Console()
    console.print(table)
    if flagged:
        console.print(f"[yellow]flagged targets:[/yellow] {', '.join(flagged)}")
