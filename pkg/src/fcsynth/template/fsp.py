# SPDX-License-Identifier: MIT

from typing import Optional

from fcsynth.model.fsp import Fsp, TurnGroup
from fcsynth.model.miss_label import MissLabel


def get_turn_group_template(
    functions: Optional[list[str]] = None, miss_label: Optional[MissLabel] = None
) -> TurnGroup:
    return {
        "functions": list(functions) if functions else [],
        "miss_label": miss_label,
    }


def get_fsp_template(fsp_id: str, start: str, seed: int) -> Fsp:
    return {
        "id": fsp_id,
        "turns": [get_turn_group_template([start])],
        "provenance": {"seed": seed, "start": start, "ops": []},
    }
