# SPDX-License-Identifier: MIT

from enum import StrEnum
from typing import Any, Optional, TypedDict

from fcsynth.model.function_signature import FunctionSignature
from fcsynth.model.hint import Hint
from fcsynth.model.translation import ToolOutput


class Polarity(StrEnum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class ErrorType(StrEnum):
    NESTED = "1"
    SHORT_DEPENDENCY = "2"
    LONG_DEPENDENCY = "3"
    WRONG_SUMMARIZATION = "4"
    MISSED_FUNCTION_OR_PARAMS = "5"


class Step(TypedDict):
    action: str
    tool_outputs: list[ToolOutput]


class Turn(TypedDict):
    query: str
    hint: Optional[Hint]
    added_functions: list[FunctionSignature]
    steps: list[Step]


class Trajectory(TypedDict):
    id: str
    data_type: str
    subtype: Optional[str]
    system_functions: list[FunctionSignature]
    turns: list[Turn]
    polarity: Polarity
    provenance: dict[str, Any]


class TrajectoryPair(TypedDict):
    id: str
    chosen: Trajectory
    rejected: Trajectory


class TurnJudgement(TypedDict):
    correct: bool
    error_type: Optional[ErrorType]


class MinedHint(TypedDict):
    text: str
    error_type: ErrorType
    rollout: int
