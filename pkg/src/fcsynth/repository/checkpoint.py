# SPDX-License-Identifier: MIT

import hashlib
import json
from pathlib import Path
from typing import Any, Optional, TypedDict

from fcsynth.errors import InputValidationError
from fcsynth.repository.jsonl import write_json

CHECKPOINT_FILE = "checkpoints.json"


class StageCheckpoint(TypedDict):
    config_hash: str
    input_hash: str
    output_hash: str
    outputs: list[str]


def hash_data(data: Any) -> str:
    text = json.dumps(data, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def hash_files(paths: list[Path]) -> str:
    digest = hashlib.sha256()
    for path in paths:
        digest.update(path.name.encode("utf-8"))
        digest.update(b"\0")
        digest.update(path.read_bytes() if path.is_file() else b"<missing>")
        digest.update(b"\0")
    return digest.hexdigest()


class CheckpointRepository:
    """Per-stage hashes of a run directory, kept in checkpoints.json."""

    def __init__(self, work_dir: Path) -> None:
        self.work_dir = work_dir
        self._stages: Optional[dict[str, StageCheckpoint]] = None
        self.is_dirty = False

    @property
    def path(self) -> Path:
        return self.work_dir / CHECKPOINT_FILE

    @property
    def stages(self) -> dict[str, StageCheckpoint]:
        if self._stages is None:
            self.__load_data()
        if self._stages is None:
            raise ValueError()
        return self._stages

    def __load_data(self) -> None:
        if not self.path.is_file():
            self._stages = {}
            return
        try:
            raw = json.loads(self.path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise InputValidationError(f"{self.path}: malformed checkpoint file ({e.msg})") from e
        if not isinstance(raw, dict):
            raise InputValidationError(f"{self.path}: checkpoint file is not an object")
        self._stages = raw

    def flush(self) -> bool:
        if self._stages is not None and self.is_dirty:
            write_json(self.path, self._stages)
            self.is_dirty = False
            return True
        return False

    def is_current(self, stage: str, config_hash: str, inputs: list[Path]) -> bool:
        record = self.stages.get(stage)
        if record is None:
            return False
        if record["config_hash"] != config_hash or record["input_hash"] != hash_files(inputs):
            return False
        outputs = [self.work_dir / name for name in record["outputs"]]
        if not all(path.is_file() for path in outputs):
            return False
        return record["output_hash"] == hash_files(outputs)

    def record(self, stage: str, config_hash: str, inputs: list[Path], outputs: list[Path]) -> None:
        self.stages[stage] = {
            "config_hash": config_hash,
            "input_hash": hash_files(inputs),
            "output_hash": hash_files(outputs),
            "outputs": [path.name for path in outputs],
        }
        self.is_dirty = True

    def invalidate(self, stage: str) -> None:
        if self.stages.pop(stage, None) is not None:
            self.is_dirty = True
