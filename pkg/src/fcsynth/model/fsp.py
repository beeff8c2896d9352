# SPDX-License-Identifier: MIT

from typing import Optional, TypedDict

from fcsynth.model.miss_label import MissLabel


class TurnGroup(TypedDict):
    functions: list[str]
    miss_label: Optional[MissLabel]  # set only on the empty turn


class Provenance(TypedDict):
    seed: int
    start: str
    ops: list[str]


class Fsp(TypedDict):
    id: str
    turns: list[TurnGroup]
    provenance: Provenance
