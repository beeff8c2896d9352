# SPDX-License-Identifier: MIT

from typing import Literal, TypedDict

ParamType = Literal["string", "number", "integer", "boolean", "array", "object"]

PARAM_TYPES: tuple[str, ...] = (
    "string",
    "number",
    "integer",
    "boolean",
    "array",
    "object",
)


class ParameterProperty(TypedDict):
    type: ParamType
    description: str


class ParameterSchema(TypedDict):
    type: str  # always "dict"
    properties: dict[str, ParameterProperty]
    required: list[str]
    optional: list[str]


class FunctionSignature(TypedDict):
    id: str
    category: str  # one of CATEGORY_LABELS or "misc"
    tool_class: str  # free-form, e.g. "Weather condition tool"
    tool_name: str
    tool_description: str
    api_name: str
    api_description: str
    parameters: ParameterSchema
    response_info: str  # free text describing the outputs
