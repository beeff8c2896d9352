# SPDX-License-Identifier: MIT

import re
from typing import Optional

import click
import typer
import typer.core

_ALIAS_SEPARATOR = re.compile(r"\s*,\s*")

# stage commands first, in the order the pipeline runs them
COMMAND_ORDER = (
    "build-graph, bg",
    "sample-fsp, sf",
    "enhance, en",
    "translate, tl",
    "distill, di",
    "mix, mx",
    "stats, st",
    "contaminate, ct",
    "loss-check, lc",
    "run, r",
    "config, c",
    "version, ve",
)


def command_names(registered: str) -> list[str]:
    """'build-graph, bg' -> ['build-graph', 'bg']"""
    return [name for name in _ALIAS_SEPARATOR.split(registered) if name]


class AliasedTyperGroup(typer.core.TyperGroup):
    """
    Group whose commands are registered as "name, alias" and answer to
    either spelling on the command line.
    """

    def resolve_name(self, typed: str) -> str:
        for registered in self.commands:
            if typed in command_names(registered):
                return registered
        return typed

    def get_command(self, ctx: click.Context, cmd_name: str) -> Optional[click.Command]:
        return super().get_command(ctx, self.resolve_name(cmd_name))

    def add_command(self, cmd: click.Command, name: Optional[str] = None) -> None:
        registered = name or cmd.name or ""
        if self.resolve_name(registered) != registered:
            # already reachable through another entry's alias
            return
        super().add_command(cmd, registered)


class OrderedTyperGroup(AliasedTyperGroup):
    """Lists commands in pipeline order in --help."""

    def list_commands(self, ctx: click.Context) -> list[str]:
        ordered = [name for name in COMMAND_ORDER if name in self.commands]
        return ordered + [name for name in self.commands if name not in ordered]
