# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Any, Iterable

from fcsynth.errors import InputValidationError
from fcsynth.fclang import parse_fc_list, serialize_fc_list
from fcsynth.fclang.serializer import serialize_call
from fcsynth.model.hint import MISS_FUNCTION_HINT, MISS_PARAMS_HINT
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.translation import QueryFcTurn, ToolOutput, TranslatedInstance
from fcsynth.repository.jsonl import read_jsonl, write_jsonl


def hint_reference(turn: QueryFcTurn) -> str:
    if turn["miss_label"] == MissLabel.MISS_FUNC:
        return MISS_FUNCTION_HINT
    if turn["miss_label"] == MissLabel.MISS_PARAMS:
        return MISS_PARAMS_HINT
    return serialize_fc_list(turn["reference_calls"])


def output_to_record(output: ToolOutput) -> dict[str, Any]:
    return {
        "call": serialize_call(output["call"]),
        "payload": output["payload"],
        "is_error": output["is_error"],
    }


def output_from_record(record: dict[str, Any]) -> ToolOutput:
    calls = parse_fc_list(f"[{record['call']}]")
    return {"call": calls[0], "payload": record["payload"], "is_error": bool(record["is_error"])}


def instance_to_record(instance: TranslatedInstance) -> dict[str, Any]:
    return {
        "id": instance["id"],
        "functions": instance["functions"],
        "turns": [
            {
                "index": turn["index"],
                "query": turn["query"],
                "hint_reference": hint_reference(turn),
                "reference_calls": serialize_fc_list(turn["reference_calls"]),
                "outputs": [output_to_record(output) for output in turn["outputs"]],
                "miss_label": str(turn["miss_label"]) if turn["miss_label"] else None,
                "targets": turn["targets"],
                "withheld": turn["withheld"],
                "added_functions": turn["added_functions"],
            }
            for turn in instance["turns"]
        ],
        "source_fsp_seed": instance["source_fsp_seed"],
        "translation_seed": instance["translation_seed"],
        "provenance": {
            "start": instance["provenance"]["start"],
            "ops": instance["provenance"]["ops"],
        },
    }


def instance_from_record(record: Any, line: int = 0) -> TranslatedInstance:
    if not isinstance(record, dict) or "turns" not in record:
        raise InputValidationError(f"instance record {line}: missing 'turns'")
    try:
        turns: list[QueryFcTurn] = [
            {
                "index": int(raw.get("index", index)),
                "query": raw["query"],
                "miss_label": MissLabel(raw["miss_label"]) if raw.get("miss_label") else None,
                "targets": list(raw.get("targets", [])),
                "withheld": list(raw.get("withheld", [])),
                "added_functions": list(raw.get("added_functions", [])),
                "reference_calls": parse_fc_list(raw.get("reference_calls", "[]")),
                "outputs": [output_from_record(o) for o in raw.get("outputs", [])],
            }
            for index, raw in enumerate(record["turns"])
        ]
    except (KeyError, ValueError) as e:
        raise InputValidationError(f"instance record {line}: {e}") from e
    provenance = record.get("provenance") or {}
    return {
        "id": str(record.get("id", f"instance-{line:06d}")),
        "functions": list(record.get("functions", [])),
        "turns": turns,
        "source_fsp_seed": int(record.get("source_fsp_seed", 0)),
        "translation_seed": int(record.get("translation_seed", 0)),
        "provenance": {
            "seed": int(record.get("source_fsp_seed", 0)),
            "start": provenance.get("start", ""),
            "ops": list(provenance.get("ops", [])),
        },
    }


def load_instances(path: Path) -> list[TranslatedInstance]:
    return [instance_from_record(record, line) for line, record in enumerate(read_jsonl(path))]


def save_instances(path: Path, instances: Iterable[TranslatedInstance]) -> int:
    return write_jsonl(path, (instance_to_record(instance) for instance in instances))
