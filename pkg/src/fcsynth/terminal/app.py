# SPDX-License-Identifier: MIT

import sys
from typing import Annotated, Optional

import click
import typer

from fcsynth import state as app_state
from fcsynth.logger import configure_logging
from fcsynth.terminal import analysis, configuration, pipeline, stages
from fcsynth.terminal.custom_typer import OrderedTyperGroup
from fcsynth.terminal.errors import EXIT_USAGE
from fcsynth.terminal.version import version
from fcsynth.view import state as view_state

app = typer.Typer(
    cls=OrderedTyperGroup,
    help="fcsynth - multi-turn function-calling trajectory synthesis",
    no_args_is_help=True,
)
app.command(name="build-graph, bg")(stages.build_graph)
app.command(name="sample-fsp, sf")(stages.sample_fsp)
app.command(name="enhance, en")(stages.enhance)
app.command(name="translate, tl")(stages.translate)
app.command(name="distill, di")(stages.distill)
app.command(name="mix, mx")(stages.mix)
app.command(name="stats, st")(stages.stats)
app.command(name="contaminate, ct")(analysis.contaminate)
app.command(name="loss-check, lc")(analysis.loss_check)
app.command(name="run, r")(pipeline.run_command)
app.add_typer(configuration.app, name="config, c")
app.command(name="version, ve")(version)


@app.callback()
def main_callback(
    verbose: Annotated[
        bool, typer.Option("--verbose", "-v", help="Log progress at INFO level")
    ] = False,
    quiet: Annotated[bool, typer.Option("--quiet", "-q", help="Only log errors")] = False,
    jobs: Annotated[
        Optional[int],
        typer.Option("--jobs", "-j", min=1, help="Worker threads (default: logical cores)"),
    ] = None,
    no_header: Annotated[
        bool,
        typer.Option(
            "--no-header",
            "-nh",
            help="Suppress header output in reports",
        ),
    ] = False,
) -> None:
    """
    fcsynth - multi-turn function-calling trajectory synthesis

    Global options that apply to all commands.
    """
    if verbose and quiet:
        raise typer.BadParameter("--verbose and --quiet are mutually exclusive")
    if verbose:
        configure_logging("INFO")
    elif quiet:
        configure_logging("ERROR")
    if jobs is not None:
        app_state.set_jobs(jobs)
    if no_header:
        view_state.set_show_header(False)


def dispatch(args: Optional[list[str]] = None) -> int:
    """Run the app and map click's outcomes onto the fcsynth exit codes."""
    try:
        code = app(args=args, standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        typer.echo("Aborted!", err=True)
        return EXIT_USAGE
    return code if isinstance(code, int) else 0


def run() -> None:
    sys.exit(dispatch())
