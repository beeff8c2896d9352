# SPDX-License-Identifier: MIT

from fcsynth.errors import InputValidationError
from fcsynth.model.fc import FunctionCall, ValidationReport, Value
from fcsynth.model.function_signature import FunctionSignature


class CallNameMismatch(InputValidationError):
    """Raised when a call is validated against the wrong signature."""

    pass


def _matches(value: Value, param_type: str) -> bool:
    match param_type:
        case "string":
            return isinstance(value, str)
        case "integer":
            return isinstance(value, int) and not isinstance(value, bool)
        case "number":
            return isinstance(value, (int, float)) and not isinstance(value, bool)
        case "boolean":
            return isinstance(value, bool)
        case "array":
            return isinstance(value, list)
        case _:
            return value is not None


def validate_args(fc: FunctionCall, sig: FunctionSignature) -> ValidationReport:
    if fc["name"] != sig["api_name"]:
        raise CallNameMismatch(
            f"call {fc['name']!r} validated against signature {sig['api_name']!r}"
        )

    params = sig["parameters"]
    properties = params["properties"]
    optional = set(params["optional"])

    missing = [name for name in params["required"] if name not in fc["args"]]
    unknown = [name for name in fc["args"] if name not in properties]
    mismatched: list[str] = []
    for name, value in fc["args"].items():
        if name not in properties:
            continue
        if value is None:
            if name not in optional:
                mismatched.append(name)
            continue
        if not _matches(value, properties[name]["type"]):
            mismatched.append(name)

    return {
        "ok": not (missing or unknown or mismatched),
        "missing_required": missing,
        "unknown": unknown,
        "type_mismatched": mismatched,
    }
