# SPDX-License-Identifier: MIT

from typing import Any, TypedDict


class MixtureConfig(TypedDict):
    n_single_turn: int  # single, parallel and multiple calls
    n_multi_turn: int
    n_irrelevance: int
    seed: int


class MixtureManifest(TypedDict):
    config: MixtureConfig
    selected: dict[str, list[str]]
    seed: int


class MixedDataset(TypedDict):
    records: list[dict[str, Any]]
    manifest: MixtureManifest


class FilterDecision(TypedDict):
    keep: bool
    keyword: str | None
    turn: int | None


class DatasetStats(TypedDict):
    counts: dict[str, int]
    subtypes: dict[str, int]
    turns: dict[int, int]
    fcs: dict[int, int]
    total: int
