# SPDX-License-Identifier: MIT

from rich import box
from rich.console import Console
from rich.table import Table

from fcsynth import time
from fcsynth.model.pipeline import RunReport
from fcsynth.view.view.views.header import header


def run_report(report: RunReport) -> None:
    header(f"pipeline run, seed {report['seed']}")

    table = Table(box=box.SIMPLE)
    table.add_column("stage")
    table.add_column("status")
    table.add_column("records", justify="right")
    table.add_column("dropped", justify="right")
    table.add_column("time", justify="right")
    for stage in report["stages"]:
        status = "[green]ran[/green]" if stage["status"] == "ran" else "[dim]cached[/dim]"
        table.add_row(
            stage["name"],
            status,
            str(stage["count"]) if stage["status"] == "ran" else "",
            str(stage["dropped"]) if stage["dropped"] else "",
            time.duration_to_str(stage["seconds"]) if stage["status"] == "ran" else "",
        )

    console = Console()
    console.print(table)
    for stage in report["stages"]:
        for reason, count in sorted(stage["drop_reasons"].items()):
            console.print(f"[yellow]{stage['name']}[/yellow] {reason}: {count}")
    console.print(f"total time {time.duration_to_str(report['seconds'])}")
