# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Any, Iterable

from fcsynth.errors import InputValidationError
from fcsynth.model.fsp import Fsp
from fcsynth.model.miss_label import MissLabel
from fcsynth.repository.jsonl import read_jsonl, write_jsonl
from fcsynth.template.fsp import get_turn_group_template


def fsp_to_record(fsp: Fsp) -> dict[str, Any]:
    miss_at = None
    label = None
    for index, turn in enumerate(fsp["turns"]):
        if turn["miss_label"] is not None:
            miss_at = index
            label = str(turn["miss_label"])
    return {
        "id": fsp["id"],
        "turns": [list(turn["functions"]) for turn in fsp["turns"]],
        "miss_label_at": miss_at,
        "label": label,
        "seed": fsp["provenance"]["seed"],
        "provenance": {
            "start": fsp["provenance"]["start"],
            "ops": list(fsp["provenance"]["ops"]),
        },
    }


def fsp_from_record(record: Any, line: int = 0) -> Fsp:
    if not isinstance(record, dict) or "turns" not in record:
        raise InputValidationError(f"FSP record {line}: missing 'turns'")
    miss_at = record.get("miss_label_at")
    label = record.get("label")
    turns = []
    for index, functions in enumerate(record["turns"]):
        if not isinstance(functions, list):
            raise InputValidationError(f"FSP record {line}: turn {index} is not a list")
        miss = None
        if miss_at is not None and index == miss_at:
            try:
                miss = MissLabel(label)
            except ValueError as e:
                raise InputValidationError(
                    f"FSP record {line}: unknown miss label {label!r}"
                ) from e
        if (miss is None) != bool(functions):
            raise InputValidationError(
                f"FSP record {line}: turn {index} is empty without a miss label or the reverse"
            )
        turns.append(get_turn_group_template([str(f) for f in functions], miss))
    if miss_at is not None and not any(turn["miss_label"] for turn in turns):
        raise InputValidationError(f"FSP record {line}: miss_label_at {miss_at!r} names no turn")
    provenance = record.get("provenance") or {}
    start = provenance.get("start") or (turns[0]["functions"][0] if turns and turns[0]["functions"] else "")
    return {
        "id": str(record.get("id", f"fsp-{line:06d}")),
        "turns": turns,
        "provenance": {
            "seed": int(record.get("seed", 0)),
            "start": start,
            "ops": list(provenance.get("ops", [])),
        },
    }


def load_fsps(path: Path) -> list[Fsp]:
    return [fsp_from_record(record, line) for line, record in enumerate(read_jsonl(path))]


def save_fsps(path: Path, fsps: Iterable[Fsp]) -> int:
    return write_jsonl(path, (fsp_to_record(fsp) for fsp in fsps))
