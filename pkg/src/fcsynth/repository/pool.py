# SPDX-License-Identifier: MIT

import json
from pathlib import Path

from fcsynth.errors import InputValidationError
from fcsynth.model.function_pool import FunctionPool
from fcsynth.repository.jsonl import read_jsonl
from fcsynth.service.function_pool import build_pool, serialize_pool


def load_pool(path: Path) -> FunctionPool:
    if not path.is_file():
        raise InputValidationError(f"pool file not found: {path}")

    if path.suffix == ".jsonl":
        return build_pool(read_jsonl(path))

    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputValidationError(
            f"{path}: malformed JSON ({e.msg}, line {e.lineno})"
        ) from e
    if not isinstance(records, list):
        raise InputValidationError(f"{path}: expected a JSON array of functions")
    return build_pool(records)


def save_pool(path: Path, pool: FunctionPool) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_pool(pool), encoding="utf-8")
