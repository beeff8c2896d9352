# SPDX-License-Identifier: MIT

from rich import box
from rich.console import Console
from rich.table import Table

from fcsynth.model.contamination import ContaminationReport
from fcsynth.view.view.views.header import header


def contamination_report(report: ContaminationReport) -> None:
    header("contamination")

    table = Table(box=box.SIMPLE)
    table.add_column("metric")
    table.add_column("value", justify="right")
    table.add_row("train sequences", str(report["train_size"]))
    table.add_row("test sequences", str(report["test_size"]))
    table.add_row("granularity", report["granularity"])
    table.add_row("exact match", f"{report['exact_match_pct']:.2f}%")
    table.add_row(f"{report['n']}-gram overlap", f"{report['ngram_pct']:.2f}%")

    console = Console()
    console.print(table)


def loss_check_report(
    rows: list[tuple[str, float, float, float]],
    anchor: float | None,
    max_rel_error: float,
    tolerance: float,
) -> None:
    """rows: (label, sft, preference, combined) per pair."""
    header("loss check")

    table = Table(box=box.SIMPLE)
    table.add_column("pair")
    table.add_column("sft", justify="right")
    table.add_column("preference", justify="right")
    table.add_column("combined", justify="right")
    for label, sft, preference, combined in rows:
        table.add_row(label, f"{sft:.6f}", f"{preference:.6f}", f"{combined:.6f}")

    console = Console()
    console.print(table)
    if anchor is not None:
        console.print(f"preference loss at theta = ref: {anchor:.6f}")
    status = "[green]ok[/green]" if max_rel_error < tolerance else "[red]FAILED[/red]"
    console.print(f"finite-difference max relative error: {max_rel_error:.3e} {status}")
