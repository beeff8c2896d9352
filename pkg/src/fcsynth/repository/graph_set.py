# SPDX-License-Identifier: MIT

import json
from pathlib import Path
from typing import Any

from fcsynth.errors import InputValidationError
from fcsynth.model.dependency_graph import GraphSet, LocalDependencyGraph
from fcsynth.repository.jsonl import read_json


def graph_set_to_json(graphs: GraphSet) -> str:
    data = {
        target: {
            "neighbors": graph["neighbors"],
            "edges": graph["edges"],
            "flagged": graph["flagged"],
        }
        for target, graph in graphs.items()
    }
    return json.dumps(data, ensure_ascii=False, indent=2) + "\n"


def _edges(target: str, raw: Any) -> list[list[str]]:
    if not isinstance(raw, list):
        raise InputValidationError(f"graph {target!r}: 'edges' must be a list")
    edges = []
    for position, edge in enumerate(raw):
        if not isinstance(edge, list) or len(edge) != 2:
            raise InputValidationError(
                f"graph {target!r}: edge {position} must be a [from, to] pair, got {edge!r}"
            )
        edges.append([str(edge[0]), str(edge[1])])
    return edges


def graph_set_from_data(data: Any) -> GraphSet:
    if not isinstance(data, dict):
        raise InputValidationError("graph set must be a JSON object keyed by function id")
    graphs: GraphSet = {}
    for target, raw in data.items():
        if not isinstance(raw, dict):
            raise InputValidationError(f"graph {target!r} must be an object")
        graph: LocalDependencyGraph = {
            "target": target,
            "neighbors": [str(n) for n in raw.get("neighbors", [])],
            "edges": _edges(target, raw.get("edges", [])),
            "flagged": bool(raw.get("flagged", False)),
        }
        graphs[target] = graph
    return graphs


def load_graph_set(path: Path) -> GraphSet:
    return graph_set_from_data(read_json(path))


def save_graph_set(path: Path, graphs: GraphSet) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(graph_set_to_json(graphs), encoding="utf-8")
