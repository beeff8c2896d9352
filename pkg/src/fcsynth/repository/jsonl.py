# SPDX-License-Identifier: MIT

import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from fcsynth.errors import InputValidationError


def dumps_line(record: Any) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(", ", ": "))


def iter_jsonl(path: Path) -> Iterator[Any]:
    if not path.is_file():
        raise InputValidationError(f"file not found: {path}")
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as e:
                raise InputValidationError(
                    f"{path}:{line_number}: malformed JSON ({e.msg})"
                ) from e


def read_jsonl(path: Path) -> list[Any]:
    return list(iter_jsonl(path))


def write_jsonl(path: Path, records: Iterable[Any]) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(dumps_line(record))
            handle.write("\n")
            count += 1
    return count


def read_json(path: Path) -> Any:
    if not path.is_file():
        raise InputValidationError(f"file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputValidationError(
            f"{path}: malformed JSON ({e.msg}, line {e.lineno})"
        ) from e


def write_json(path: Path, data: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
