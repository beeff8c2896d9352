# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Annotated, Optional, cast

import click
import numpy as np
import typer

from fcsynth.model.contamination import Granularity
from fcsynth.model.losses import LossConfig, LossForm, Reduction, ToyInstance
from fcsynth.repository.fsp import load_fsps
from fcsynth.repository.jsonl import read_json, write_json
from fcsynth.service.contamination import contamination_report
from fcsynth.service.training_losses import (
    CategoricalPolicy,
    combined_loss,
    finite_difference_check,
    preference_loss,
    policies,
    random_toy_instance,
    sft_loss,
    toy_instance_from_data,
)
from fcsynth.terminal.errors import EXIT_VALIDATION, exit_on_error
from fcsynth.view.view.views import analysis as analysis_report


def contaminate(
    train_path: Annotated[Path, typer.Option("--train", help="training FSP JSONL")],
    test_path: Annotated[Path, typer.Option("--test", help="test FSP JSONL")],
    n: Annotated[int, typer.Option("--n", "-n", min=1, help="n-gram order")] = 2,
    granularity: Annotated[
        str,
        typer.Option(
            "--granularity",
            click_type=click.Choice(["function", "turn"]),
            help="one token per function or per turn",
        ),
    ] = "function",
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="report JSON")] = None,
) -> None:
    """
    Exact-match and n-gram overlap between two FSP corpora.
    """
    with exit_on_error():
        report = contamination_report(
            load_fsps(train_path), load_fsps(test_path), n, cast(Granularity, granularity)
        )
        if out is not None:
            write_json(out, report)

    analysis_report.contamination_report(report)


def _load_toy_instances(path: Path) -> list[ToyInstance]:
    data = read_json(path)
    if isinstance(data, list):
        return [toy_instance_from_data(item) for item in data]
    return [toy_instance_from_data(data)]


def _at_reference(instance: ToyInstance) -> tuple[CategoricalPolicy, CategoricalPolicy]:
    _, ref = policies(instance)
    return (ref.with_logits(ref.logits.copy()), ref)


def loss_check(
    instances_path: Annotated[
        Optional[Path], typer.Option("--instances", "-i", help="toy instance JSON")
    ] = None,
    form: Annotated[
        str,
        typer.Option(
            "--form",
            click_type=click.Choice(["log-ratio", "as-printed"]),
            help="preference margin form",
        ),
    ] = "log-ratio",
    weight: Annotated[
        float, typer.Option("--lambda", min=0.0, help="weight of the preference term")
    ] = 1.0,
    eta: Annotated[float, typer.Option("--eta", help="margin scale, must be positive")] = 1.0,
    reduction: Annotated[
        str, typer.Option("--reduction", click_type=click.Choice(["mean", "sum"]))
    ] = "mean",
    n_random: Annotated[
        int, typer.Option("--random", min=0, help="extra random instances for the gradient check")
    ] = 20,
    seed: Annotated[int, typer.Option("--seed", "-s")] = 0,
    step: Annotated[float, typer.Option("--step", help="finite-difference step")] = 1e-5,
    tolerance: Annotated[float, typer.Option("--tolerance")] = 1e-4,
) -> None:
    """
    Evaluate the training objective on toy policies and check its gradient.
    """
    cfg: LossConfig = {
        "lambda": weight,
        "eta": eta,
        "form": cast(LossForm, form),
        "reduction": cast(Reduction, reduction),
    }
    with exit_on_error():
        loaded = _load_toy_instances(instances_path) if instances_path is not None else []
        rng = np.random.default_rng(seed)
        checked = loaded + [random_toy_instance(rng) for _ in range(n_random)]
        if not checked:
            raise typer.BadParameter("nothing to check: give --instances or --random")

        rows: list[tuple[str, float, float, float]] = []
        anchors: list[float] = []
        for i, instance in enumerate(loaded):
            theta, ref = policies(instance)
            at_theta, at_ref = _at_reference(instance)
            for j, pair in enumerate(instance["pairs"]):
                rows.append(
                    (
                        f"{i}:{j}",
                        sft_loss(theta, pair["chosen"], cfg["reduction"]),
                        preference_loss(theta, ref, pair, cfg),
                        combined_loss(theta, ref, pair, cfg),
                    )
                )
                anchors.append(preference_loss(at_theta, at_ref, pair, cfg))
        max_rel_error = max(finite_difference_check(instance, cfg, step) for instance in checked)

    analysis_report.loss_check_report(
        rows, float(np.mean(anchors)) if anchors else None, max_rel_error, tolerance
    )
    if not max_rel_error < tolerance:
        raise typer.Exit(EXIT_VALIDATION)
