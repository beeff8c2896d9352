# SPDX-License-Identifier: MIT

import os
from typing import Annotated, Optional

import click
import typer
from rich.console import Console
from rich.table import Table

from fcsynth import configuration
from fcsynth.repository.configuration import (
    CONFIGURATION_REPO,
)
from fcsynth.terminal.custom_typer import AliasedTyperGroup

app = typer.Typer(cls=AliasedTyperGroup, no_args_is_help=True)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def _config_table(title: Optional[str] = None) -> Table:
    config = CONFIGURATION_REPO.get_config()

    table = Table(title=title)
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="magenta")
    for key, value in config.items():
        table.add_row(key, "None" if value is None else str(value))
    return table


@app.command("view, v")
def view() -> None:
    """Display current configuration settings."""
    config = CONFIGURATION_REPO.get_config()

    console = Console()
    console.print(_config_table())

    token_env = config["llm_token_env"]
    token_state = "set" if os.environ.get(token_env) else "not set"
    console.print(f"API token variable: {token_env} ({token_state})")
    console.print(f"Config file: {configuration.APP_CONFIG_PATH}")

    yaml_library_type = "untested"
    try:
        from yaml import CDumper as Dumper  # noqa: F401
        from yaml import CLoader as Loader  # noqa: F401

        yaml_library_type = "C"
    except ImportError:
        from yaml import Loader  # type: ignore[assignment] # noqa: F401

        yaml_library_type = "Python"

    console.print(f"YAML Library Type: {yaml_library_type}")


@app.command("set, s")
def set(
    llm_endpoint: Annotated[
        Optional[str],
        typer.Option("--llm-endpoint", help="chat-completion URL"),
    ] = None,
    llm_model: Annotated[
        Optional[str], typer.Option("--llm-model", help="model name sent with each request")
    ] = None,
    llm_temperature: Annotated[
        Optional[float], typer.Option("--llm-temperature", min=0.0)
    ] = None,
    llm_max_tokens: Annotated[Optional[int], typer.Option("--llm-max-tokens", min=1)] = None,
    llm_timeout: Annotated[
        Optional[float], typer.Option("--llm-timeout", min=0.1, help="seconds per request")
    ] = None,
    llm_max_retries: Annotated[Optional[int], typer.Option("--llm-max-retries", min=0)] = None,
    llm_max_in_flight: Annotated[
        Optional[int],
        typer.Option("--llm-max-in-flight", min=1, help="concurrent requests across workers"),
    ] = None,
    llm_token_env: Annotated[
        Optional[str],
        typer.Option("--llm-token-env", help="environment variable holding the API token"),
    ] = None,
    llm_response_path: Annotated[
        Optional[str],
        typer.Option("--llm-response-path", help="dotted path to the reply text"),
    ] = None,
    rollout_temperature: Annotated[
        Optional[float], typer.Option("--rollout-temperature", min=0.0)
    ] = None,
    default_jobs: Annotated[Optional[int], typer.Option("--default-jobs", min=1)] = None,
    log_level: Annotated[
        Optional[str],
        typer.Option("--log-level", click_type=click.Choice(LOG_LEVELS)),
    ] = None,
    reset: Annotated[
        Optional[list[str]],
        typer.Option("--reset", help="restore a key to its default (accepts multiple)"),
    ] = None,
) -> None:
    """
    Update configuration settings.
    """
    try:
        for key in reset or []:
            CONFIGURATION_REPO.reset_key(key)
        CONFIGURATION_REPO.update_config(
            llm_endpoint=llm_endpoint,
            llm_model=llm_model,
            llm_temperature=llm_temperature,
            llm_max_tokens=llm_max_tokens,
            llm_timeout=llm_timeout,
            llm_max_retries=llm_max_retries,
            llm_max_in_flight=llm_max_in_flight,
            llm_token_env=llm_token_env,
            llm_response_path=llm_response_path,
            rollout_temperature=rollout_temperature,
            default_jobs=default_jobs,
            log_level=log_level,
        )
    except KeyError as e:
        raise typer.BadParameter(str(e.args[0])) from e

    console = Console()
    console.print("[green]Configuration updated successfully![/green]\n")
    console.print(_config_table("Updated Configuration"))
