# SPDX-License-Identifier: MIT

from typing import TypedDict, Union

Value = Union[str, int, float, bool, None, list["Value"]]


class FunctionCall(TypedDict):
    name: str
    args: dict[str, Value]


FcList = list[FunctionCall]


class ValidationReport(TypedDict):
    ok: bool
    missing_required: list[str]
    unknown: list[str]
    type_mismatched: list[str]
