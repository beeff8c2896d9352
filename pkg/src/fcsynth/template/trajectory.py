# SPDX-License-Identifier: MIT

from typing import Any, Optional

from fcsynth.model.data_type import DataType
from fcsynth.model.function_signature import FunctionSignature
from fcsynth.model.hint import Hint
from fcsynth.model.trajectory import Polarity, Trajectory, Turn


def get_turn_template(
    query: str,
    hint: Optional[Hint] = None,
    added_functions: Optional[list[FunctionSignature]] = None,
) -> Turn:
    return {
        "query": query,
        "hint": hint,
        "added_functions": list(added_functions) if added_functions else [],
        "steps": [],
    }


def get_trajectory_template(
    trajectory_id: str,
    system_functions: list[FunctionSignature],
    polarity: Polarity = Polarity.POSITIVE,
    data_type: DataType = DataType.MULTI_TURN,
    provenance: Optional[dict[str, Any]] = None,
) -> Trajectory:
    return {
        "id": trajectory_id,
        "data_type": data_type,
        "subtype": None,
        "system_functions": list(system_functions),
        "turns": [],
        "polarity": polarity,
        "provenance": dict(provenance) if provenance else {},
    }
