# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Annotated, Optional

import typer

from fcsynth.repository.configuration import CONFIGURATION_REPO
from fcsynth.repository.pipeline_config import load_pipeline_document
from fcsynth.service.pipeline import run_pipeline
from fcsynth.terminal.errors import exit_on_error
from fcsynth.view.view.views import pipeline as pipeline_report


def run_command(
    config_path: Annotated[Path, typer.Option("--config", "-c", help="pipeline YAML")],
    seed: Annotated[
        Optional[int], typer.Option("--seed", "-s", help="overrides the document's seed")
    ] = None,
    work_dir: Annotated[
        Optional[Path], typer.Option("--work-dir", "-w", help="overrides the document's work_dir")
    ] = None,
    jobs: Annotated[
        Optional[int], typer.Option("--jobs", "-j", min=1, help="overrides the document's jobs")
    ] = None,
) -> None:
    """
    Run every stage, reusing checkpointed outputs that are still current.
    """
    with exit_on_error():
        report = run_pipeline(
            load_pipeline_document(config_path),
            CONFIGURATION_REPO.get_config(),
            seed=seed,
            work_dir=str(work_dir) if work_dir is not None else None,
            jobs=jobs,
        )

    pipeline_report.run_report(report)
