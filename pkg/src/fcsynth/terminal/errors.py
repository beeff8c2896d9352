# SPDX-License-Identifier: MIT

from contextlib import contextmanager
from typing import Iterator

import typer
from rich.console import Console
from rich.markup import escape

from fcsynth.errors import BackendError, FcsynthError

EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_BACKEND = 3

_stderr = Console(stderr=True)


@contextmanager
def exit_on_error() -> Iterator[None]:
    """Turn package errors into the CLI exit codes."""
    try:
        yield
    except BackendError as e:
        _stderr.print(f"[red]Backend error:[/red] {escape(str(e))}", highlight=False)
        raise typer.Exit(EXIT_BACKEND)
    except FcsynthError as e:
        _stderr.print(f"[red]Error:[/red] {escape(str(e))}", highlight=False)
        raise typer.Exit(EXIT_VALIDATION)
