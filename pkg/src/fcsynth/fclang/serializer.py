# SPDX-License-Identifier: MIT

import math

from fcsynth.errors import InputValidationError
from fcsynth.model.fc import FcList, FunctionCall, Value

_ESCAPED = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def serialize_string(value: str) -> str:
    out = []
    for char in value:
        if char in _ESCAPED:
            out.append(_ESCAPED[char])
        elif ord(char) < 0x20:
            out.append(f"\\u{ord(char):04x}")
        else:
            out.append(char)
    return '"' + "".join(out) + '"'


def serialize_value(value: Value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InputValidationError(f"{value!r} has no literal in the call language")
        return repr(value)
    if isinstance(value, str):
        return serialize_string(value)
    return "[" + ", ".join(serialize_value(item) for item in value) + "]"


def serialize_call(call: FunctionCall) -> str:
    args = ", ".join(
        f"{name}={serialize_value(value)}" for name, value in call["args"].items()
    )
    return f"{call['name']}({args})"


def serialize_fc_list(calls: FcList) -> str:
    return "[" + ", ".join(serialize_call(call) for call in calls) + "]"


def serialize_hint_calls(calls: FcList) -> str:
    """Comma-separated calls without brackets, as written after a hint marker."""
    return ", ".join(serialize_call(call) for call in calls)


def canonical_args(call: FunctionCall) -> str:
    """Order-independent rendering of the arguments, used for hashing."""
    return ", ".join(
        f"{name}={serialize_value(call['args'][name])}" for name in sorted(call["args"])
    )
