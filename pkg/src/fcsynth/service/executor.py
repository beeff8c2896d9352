# SPDX-License-Identifier: MIT

import hashlib
from typing import Any, Optional, Protocol

from fcsynth.fclang.serializer import canonical_args
from fcsynth.model.fc import FunctionCall
from fcsynth.model.function_signature import FunctionSignature
from fcsynth.model.translation import ToolOutput
from fcsynth.service.function_pool import response_fields

ERROR_TEXTS: tuple[str, ...] = (
    "Bad request: the server could not process the supplied arguments",
    "Bad request: the supplied value does not match the expected parameter format",
)


class Executor(Protocol):
    def execute(self, fc: FunctionCall, sig: FunctionSignature) -> ToolOutput: ...


def _digest(*parts: object) -> str:
    joined = "\x1f".join(str(part) for part in parts)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()


def _fraction(hex_digest: str) -> float:
    return int(hex_digest[:13], 16) / float(1 << 52)


def _field_value(field: str, field_type: str, digest: str) -> Any:
    number = int(digest[:12], 16)
    match field_type:
        case "integer":
            return number % 1000
        case "number":
            return round((number % 100000) / 100, 2)
        case "boolean":
            return number % 2 == 0
        case "array":
            return [f"{field}_{digest[:8]}", f"{field}_{digest[8:16]}"]
        case "object":
            return {"id": f"{field}_{digest[:12]}"}
        case _:
            return f"{field}_{digest[:12]}"


def simulated_execute(
    fc: FunctionCall,
    sig: FunctionSignature,
    seed: int,
    error_rate: float = 0.0,
) -> ToolOutput:
    """Deterministic stand-in for running the call, keyed on (seed, name, args)."""
    args = canonical_args(fc)
    if error_rate > 0 and _fraction(_digest(seed, fc["name"], args, "error")) < error_rate:
        choice = int(_digest(seed, fc["name"], args, "error-text")[:8], 16) % len(ERROR_TEXTS)
        return {"call": fc, "payload": {"error": ERROR_TEXTS[choice]}, "is_error": True}

    fields = response_fields(sig) or [("result", "string")]
    payload = {
        field: _field_value(field, field_type, _digest(seed, fc["name"], args, field))
        for field, field_type in fields
    }
    return {"call": fc, "payload": payload, "is_error": False}


def unknown_function_output(fc: FunctionCall) -> ToolOutput:
    return {
        "call": fc,
        "payload": {"error": f"Bad request: function {fc['name']} is not available"},
        "is_error": True,
    }


class SimulatedExecutor:
    def __init__(self, seed: int, error_rate: float = 0.0) -> None:
        self.seed = seed
        self.error_rate = error_rate

    def execute(self, fc: FunctionCall, sig: Optional[FunctionSignature]) -> ToolOutput:
        if sig is None:
            return unknown_function_output(fc)
        return simulated_execute(fc, sig, self.seed, self.error_rate)
