# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Any, Iterable

from fcsynth.errors import InputValidationError
from fcsynth.model.data_type import DataType
from fcsynth.model.hint import HintKind
from fcsynth.model.trajectory import Polarity, Trajectory, TrajectoryPair
from fcsynth.repository.instance import output_from_record, output_to_record
from fcsynth.repository.jsonl import read_jsonl, write_jsonl
from fcsynth.service.function_pool import parse_signature, signature_to_record


def trajectory_to_record(traj: Trajectory) -> dict[str, Any]:
    return {
        "id": traj["id"],
        "data_type": str(traj["data_type"]),
        "subtype": traj["subtype"],
        "polarity": str(traj["polarity"]),
        "system_functions": [signature_to_record(sig) for sig in traj["system_functions"]],
        "turns": [
            {
                "query": turn["query"],
                "hint": dict(turn["hint"]) if turn["hint"] else None,
                "added_functions": [signature_to_record(s) for s in turn["added_functions"]],
                "steps": [
                    {
                        "action": step["action"],
                        "tool_outputs": [output_to_record(o) for o in step["tool_outputs"]],
                    }
                    for step in turn["steps"]
                ],
            }
            for turn in traj["turns"]
        ],
        "provenance": traj["provenance"],
    }


def trajectory_from_record(record: Any, line: int = 0) -> Trajectory:
    if not isinstance(record, dict) or "turns" not in record:
        raise InputValidationError(f"trajectory record {line}: missing 'turns'")
    try:
        return {
            "id": str(record["id"]),
            "data_type": DataType(record.get("data_type", DataType.MULTI_TURN)),
            "subtype": record.get("subtype"),
            "polarity": Polarity(record.get("polarity", Polarity.POSITIVE)),
            "system_functions": [parse_signature(raw) for raw in record["system_functions"]],
            "turns": [
                {
                    "query": raw["query"],
                    "hint": (
                        {"kind": HintKind(raw["hint"]["kind"]), "content": raw["hint"]["content"]}
                        if raw.get("hint")
                        else None
                    ),
                    "added_functions": [
                        parse_signature(s) for s in raw.get("added_functions", [])
                    ],
                    "steps": [
                        {
                            "action": step["action"],
                            "tool_outputs": [
                                output_from_record(o) for o in step.get("tool_outputs", [])
                            ],
                        }
                        for step in raw.get("steps", [])
                    ],
                }
                for raw in record["turns"]
            ],
            "provenance": dict(record.get("provenance") or {}),
        }
    except (KeyError, TypeError, ValueError) as e:
        raise InputValidationError(f"trajectory record {line}: {e}") from e


def load_trajectories(path: Path) -> list[Trajectory]:
    return [trajectory_from_record(record, line) for line, record in enumerate(read_jsonl(path))]


def save_trajectories(path: Path, trajectories: Iterable[Trajectory]) -> int:
    return write_jsonl(path, (trajectory_to_record(traj) for traj in trajectories))


def load_pairs(path: Path) -> list[TrajectoryPair]:
    pairs: list[TrajectoryPair] = []
    for line, record in enumerate(read_jsonl(path)):
        if not isinstance(record, dict) or "chosen" not in record or "rejected" not in record:
            raise InputValidationError(f"pair record {line}: missing 'chosen' or 'rejected'")
        pairs.append(
            {
                "id": str(record.get("id", record["chosen"].get("id", line))),
                "chosen": trajectory_from_record(record["chosen"], line),
                "rejected": trajectory_from_record(record["rejected"], line),
            }
        )
    return pairs


def save_pairs(path: Path, pairs: Iterable[TrajectoryPair]) -> int:
    return write_jsonl(
        path,
        (
            {
                "id": pair["id"],
                "chosen": trajectory_to_record(pair["chosen"]),
                "rejected": trajectory_to_record(pair["rejected"]),
            }
            for pair in pairs
        ),
    )
