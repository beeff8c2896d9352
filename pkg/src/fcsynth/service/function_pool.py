# SPDX-License-Identifier: MIT

import json
import re
from typing import Any, Optional, Protocol, cast

from fcsynth.errors import BackendError, InputValidationError
from fcsynth.logger import get_logger
from fcsynth.model.category import (
    CATEGORY_SET,
    DEFAULT_TOOL_CLASS,
    MISC_CATEGORY,
)
from fcsynth.model.function_pool import FunctionPool
from fcsynth.model.function_signature import (
    PARAM_TYPES,
    FunctionSignature,
    ParameterProperty,
    ParameterSchema,
)
from fcsynth.service.concurrency import map_ordered

logger = get_logger(__name__)

TYPE_ALIASES = {
    "str": "string",
    "int": "integer",
    "float": "number",
    "double": "number",
    "bool": "boolean",
    "list": "array",
    "tuple": "array",
    "dict": "object",
}

_RESPONSE_FIELD = re.compile(r"([A-Za-z_][A-Za-z0-9_]*) \(([A-Za-z]+)\)")


class PoolValidationError(InputValidationError):
    """Raised when a pool record breaks a signature invariant."""

    def __init__(self, api_name: str, field: str, message: str) -> None:
        self.api_name = api_name
        self.field = field
        super().__init__(f"{api_name or '<unnamed>'}: {field}: {message}")


class UnknownFunctionError(InputValidationError):
    """Raised when a function id is not part of the pool."""

    pass


class ClassificationError(BackendError):
    """Raised when the taxonomy judge gives no usable answer."""

    pass


class TaxonomyJudge(Protocol):
    def classify(self, sig: FunctionSignature) -> str:
        """Return the raw label text: category on the first line, class optionally on the second."""
        ...


def _text_field(raw: dict[str, Any], key: str, api_name: str, default: str) -> str:
    value = raw.get(key, default)
    if value is None:
        return default
    if not isinstance(value, str):
        raise PoolValidationError(api_name, key, "must be a string")
    return value


def _name_list(raw: dict[str, Any], key: str, api_name: str) -> list[str]:
    value = raw.get(key, [])
    if value is None:
        return []
    if not isinstance(value, list) or not all(isinstance(n, str) for n in value):
        raise PoolValidationError(api_name, f"parameters.{key}", "must be a list of names")
    return list(value)


def normalize_param_type(raw_type: Any, api_name: str, param: str) -> str:
    if not isinstance(raw_type, str):
        raise PoolValidationError(api_name, f"parameters.properties.{param}.type", "missing type")
    lowered = raw_type.strip().lower()
    lowered = TYPE_ALIASES.get(lowered, lowered)
    if lowered not in PARAM_TYPES:
        raise PoolValidationError(
            api_name,
            f"parameters.properties.{param}.type",
            f"unsupported type {raw_type!r}",
        )
    return lowered


def _parse_parameters(raw: Any, api_name: str) -> ParameterSchema:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise PoolValidationError(api_name, "parameters", "must be an object")

    raw_properties = raw.get("properties", {}) or {}
    if not isinstance(raw_properties, dict):
        raise PoolValidationError(api_name, "parameters.properties", "must be an object")

    properties: dict[str, ParameterProperty] = {}
    for name, spec in raw_properties.items():
        if not isinstance(spec, dict):
            raise PoolValidationError(
                api_name, f"parameters.properties.{name}", "must be an object"
            )
        description = spec.get("description", "") or ""
        properties[name] = cast(
            ParameterProperty,
            {
                "type": normalize_param_type(spec.get("type"), api_name, name),
                "description": str(description),
            },
        )

    required = _name_list(raw, "required", api_name)
    optional = _name_list(raw, "optional", api_name)

    for key, names in (("required", required), ("optional", optional)):
        for name in names:
            if name not in properties:
                raise PoolValidationError(
                    api_name,
                    f"parameters.{key}",
                    f"parameter {name!r} is not declared in properties",
                )
    overlap = sorted(set(required) & set(optional))
    if overlap:
        raise PoolValidationError(
            api_name,
            "parameters.optional",
            f"parameters both required and optional: {', '.join(overlap)}",
        )
    undeclared = [name for name in properties if name not in required and name not in optional]
    if undeclared:
        raise PoolValidationError(
            api_name,
            "parameters.properties",
            f"parameters neither required nor optional: {', '.join(undeclared)}",
        )

    return {
        "type": str(raw.get("type", "dict") or "dict"),
        "properties": properties,
        "required": required,
        "optional": optional,
    }


def parse_signature(raw: Any) -> FunctionSignature:
    if not isinstance(raw, dict):
        raise PoolValidationError("", "<record>", "function entry must be an object")
    api_name = raw.get("api_name")
    if not isinstance(api_name, str) or not api_name.strip():
        raise PoolValidationError("", "api_name", "must be a non-empty string")

    raw_id = raw.get("id", api_name)
    function_id = str(raw_id) if raw_id not in (None, "") else api_name

    return {
        "id": function_id,
        "category": _text_field(raw, "category", api_name, MISC_CATEGORY) or MISC_CATEGORY,
        "tool_class": _text_field(raw, "tool_class", api_name, DEFAULT_TOOL_CLASS)
        or DEFAULT_TOOL_CLASS,
        "tool_name": _text_field(raw, "tool_name", api_name, ""),
        "tool_description": _text_field(raw, "tool_description", api_name, ""),
        "api_name": api_name,
        "api_description": _text_field(raw, "api_description", api_name, ""),
        "parameters": _parse_parameters(raw.get("parameters"), api_name),
        "response_info": _text_field(raw, "response_info", api_name, ""),
    }


def build_pool(records: list[Any]) -> FunctionPool:
    if not records:
        raise InputValidationError("function pool is empty")
    functions: list[FunctionSignature] = []
    seen_names: set[str] = set()
    seen_ids: set[str] = set()
    for raw in records:
        sig = parse_signature(raw)
        if sig["api_name"] in seen_names:
            raise PoolValidationError(sig["api_name"], "api_name", "duplicate api_name")
        if sig["id"] in seen_ids:
            raise PoolValidationError(sig["api_name"], "id", "duplicate id")
        seen_names.add(sig["api_name"])
        seen_ids.add(sig["id"])
        functions.append(sig)
    return FunctionPool(functions)


def signature_to_record(sig: FunctionSignature) -> dict[str, Any]:
    return {
        "id": sig["id"],
        "category": sig["category"],
        "tool_class": sig["tool_class"],
        "tool_name": sig["tool_name"],
        "tool_description": sig["tool_description"],
        "api_name": sig["api_name"],
        "api_description": sig["api_description"],
        "parameters": {
            "type": sig["parameters"]["type"],
            "properties": {
                name: {"type": prop["type"], "description": prop["description"]}
                for name, prop in sig["parameters"]["properties"].items()
            },
            "required": list(sig["parameters"]["required"]),
            "optional": list(sig["parameters"]["optional"]),
        },
        "response_info": sig["response_info"],
    }


def serialize_pool(pool: FunctionPool) -> str:
    records = [signature_to_record(sig) for sig in pool]
    return json.dumps(records, ensure_ascii=False, indent=2) + "\n"


def prompt_view(sig: FunctionSignature) -> dict[str, Any]:
    """The signature in the shape shown to models inside prompts."""
    record = signature_to_record(sig)
    del record["id"]
    del record["tool_class"]
    return record


def response_fields(sig: FunctionSignature) -> list[tuple[str, str]]:
    """Output fields declared as 'name (type)' in the response description."""
    fields: list[tuple[str, str]] = []
    seen: set[str] = set()
    for name, field_type in _RESPONSE_FIELD.findall(sig["response_info"]):
        if name in seen:
            continue
        seen.add(name)
        lowered = TYPE_ALIASES.get(field_type.lower(), field_type.lower())
        fields.append((name, lowered if lowered in PARAM_TYPES else "string"))
    return fields


def require_function(pool: FunctionPool, function_id: str) -> FunctionSignature:
    sig = pool.get(function_id)
    if sig is None:
        raise UnknownFunctionError(f"function {function_id!r} is not in the pool")
    return sig


def parse_classification(text: str, sig: FunctionSignature) -> tuple[str, str]:
    lines = [line.strip().strip("'\"`").strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise ClassificationError(f"{sig['api_name']}: empty classification")

    category = lines[0]
    if category not in CATEGORY_SET or category == MISC_CATEGORY:
        if category != MISC_CATEGORY:
            logger.warning(
                "%s: label %r is outside the category list, using misc",
                sig["api_name"],
                category,
            )
        return (MISC_CATEGORY, DEFAULT_TOOL_CLASS)

    if len(lines) > 1:
        return (category, lines[1])
    if sig["tool_class"] and sig["tool_class"] != DEFAULT_TOOL_CLASS:
        return (category, sig["tool_class"])
    return (category, DEFAULT_TOOL_CLASS)


def classify_function(
    sig: FunctionSignature, classifier: TaxonomyJudge, retries: int = 2
) -> tuple[str, str]:
    last_error: Optional[Exception] = None
    for _ in range(retries + 1):
        try:
            return parse_classification(classifier.classify(sig), sig)
        except (BackendError, ValueError) as e:
            last_error = e
    raise ClassificationError(
        f"{sig['api_name']}: classification failed after {retries + 1} attempts: {last_error}"
    )


def classify_pool(
    pool: FunctionPool,
    classifier: TaxonomyJudge,
    retries: int = 2,
    jobs: Optional[int] = None,
) -> FunctionPool:
    def relabel(sig: FunctionSignature) -> FunctionSignature:
        try:
            category, tool_class = classify_function(sig, classifier, retries)
        except ClassificationError as e:
            logger.warning("%s; defaulting to misc", e)
            category, tool_class = MISC_CATEGORY, DEFAULT_TOOL_CLASS
        updated = dict(sig)
        updated["category"] = category
        updated["tool_class"] = tool_class
        return cast(FunctionSignature, updated)

    return FunctionPool(map_ordered(relabel, list(pool), jobs))
