# SPDX-License-Identifier: MIT

from typing import Any, Final, Literal, Optional, TypedDict

from fcsynth.model.fc import FcList, FunctionCall
from fcsynth.model.fsp import Provenance
from fcsynth.model.miss_label import MissLabel

FINISH: Final = "FINISH"
Finish = Literal["FINISH"]


class ToolOutput(TypedDict):
    call: FunctionCall
    payload: Any
    is_error: bool


class QueryFcTurn(TypedDict):
    index: int
    query: str
    miss_label: Optional[MissLabel]
    targets: list[str]  # function ids this turn is about
    withheld: list[str]  # omitted params (miss params) or function ids (miss func)
    added_functions: list[str]  # functions announced to the agent on this turn
    reference_calls: FcList
    outputs: list[ToolOutput]


class TranslatedInstance(TypedDict):
    id: str
    functions: list[str]  # tool list offered at the start of the conversation
    turns: list[QueryFcTurn]
    source_fsp_seed: int
    translation_seed: int
    provenance: Provenance


class DroppedInstance(TypedDict):
    id: str
    stage: str
    reason: str
