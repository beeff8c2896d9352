# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Any

from yaml import YAMLError, load

try:
    from yaml import CLoader as Loader
except ImportError:
    from yaml import Loader  # type: ignore[assignment]

from fcsynth.errors import InputValidationError


def load_pipeline_document(path: Path) -> dict[str, Any]:
    if not path.is_file():
        raise InputValidationError(f"pipeline config not found: {path}")
    try:
        raw = load(path.read_text(encoding="utf-8"), Loader=Loader)
    except YAMLError as e:
        raise InputValidationError(f"{path}: malformed YAML ({e})") from e
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise InputValidationError(f"{path}: pipeline config must be a mapping")
    return raw
