# SPDX-License-Identifier: MIT

import json
import random
import re
from typing import Any, Optional, Protocol

from fcsynth.errors import BackendError
from fcsynth.llm.prompts import JudgmentError
from fcsynth.logger import get_logger
from fcsynth.model.dependency_graph import GraphSet, LocalDependencyGraph
from fcsynth.model.function_pool import FunctionPool
from fcsynth.model.function_signature import FunctionSignature
from fcsynth.service.concurrency import map_ordered
from fcsynth.service.function_pool import require_function

logger = get_logger(__name__)

_FENCE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


class GraphBuildError(BackendError):
    """Raised when no target could be judged at all."""

    pass


class DependencyJudge(Protocol):
    def adjacency(
        self, target: FunctionSignature, candidates: list[FunctionSignature]
    ) -> str:
        """Return the raw adjacency-dictionary answer for one target."""
        ...


def sample_candidates(
    pool: FunctionPool,
    target: str,
    k: int,
    rng: random.Random,
    cross_category: bool = False,
) -> list[str]:
    sig = require_function(pool, target)
    if k < 1:
        raise ValueError("k must be at least 1")
    if cross_category:
        eligible = pool.ids()
    else:
        eligible = pool.group_members(sig["category"], sig["tool_class"])
    eligible = sorted(fid for fid in eligible if fid != target)
    return rng.sample(eligible, min(k, len(eligible)))


def parse_adjacency(text: str) -> dict[str, Any]:
    body = text.strip()
    fenced = _FENCE.search(body)
    if fenced:
        body = fenced.group(1).strip()
    else:
        start, end = body.find("{"), body.rfind("}")
        if start != -1 and end > start:
            body = body[start : end + 1]
    try:
        data = json.loads(body)
    except json.JSONDecodeError as e:
        raise JudgmentError(f"adjacency answer is not JSON: {e.msg}") from e
    if not isinstance(data, dict):
        raise JudgmentError("adjacency answer is not a JSON object")
    return data


def judge_edges(
    target: FunctionSignature,
    candidates: list[FunctionSignature],
    judge: DependencyJudge,
    retries: int = 2,
) -> list[list[str]]:
    last_error: Optional[Exception] = None
    adjacency: Optional[dict[str, Any]] = None
    for _ in range(retries + 1):
        try:
            adjacency = parse_adjacency(judge.adjacency(target, candidates))
            if target["api_name"] not in adjacency:
                raise JudgmentError(f"adjacency answer has no key {target['api_name']!r}")
            if not isinstance(adjacency[target["api_name"]], list):
                raise JudgmentError("adjacency value is not a list")
            break
        except BackendError as e:
            last_error = e
            adjacency = None
    if adjacency is None:
        raise JudgmentError(
            f"{target['api_name']}: no usable adjacency after {retries + 1} attempts: {last_error}"
        )

    by_name = {sig["api_name"]: sig["id"] for sig in candidates}
    edges: list[list[str]] = []
    for name in adjacency[target["api_name"]]:
        if name == target["api_name"]:
            logger.warning("%s: judge listed the target itself, discarded", name)
            continue
        if name not in by_name:
            logger.warning(
                "%s: judge named %r which is not a candidate, discarded",
                target["api_name"],
                name,
            )
            continue
        edge = [target["id"], by_name[name]]
        if edge not in edges:
            edges.append(edge)
    return edges


def build_graph_set(
    pool: FunctionPool,
    judge: DependencyJudge,
    k_cand: int,
    rng: random.Random,
    cross_category: bool = False,
    retries: int = 2,
    jobs: Optional[int] = None,
) -> GraphSet:
    base_seed = rng.getrandbits(64)

    def build_one(target_id: str) -> tuple[LocalDependencyGraph, bool]:
        target_rng = random.Random(f"{base_seed}:{target_id}")
        neighbors = sample_candidates(pool, target_id, k_cand, target_rng, cross_category)
        graph: LocalDependencyGraph = {
            "target": target_id,
            "neighbors": neighbors,
            "edges": [],
            "flagged": False,
        }
        if not neighbors:
            return (graph, False)
        try:
            graph["edges"] = judge_edges(
                pool.by_id(target_id),
                [pool.by_id(fid) for fid in neighbors],
                judge,
                retries,
            )
        except BackendError as e:
            logger.warning("%s: recorded edgeless and flagged (%s)", target_id, e)
            graph["flagged"] = True
        return (graph, True)

    results = map_ordered(build_one, pool.ids(), jobs)

    judged = [graph for graph, was_judged in results if was_judged]
    if judged and all(graph["flagged"] for graph in judged):
        raise GraphBuildError(f"dependency judgement failed for all {len(judged)} targets")

    return {graph["target"]: graph for graph, _ in results}


def out_neighbors(graphs: GraphSet, node: str) -> list[str]:
    graph = graphs.get(node)
    if graph is None:
        return []
    return [edge[1] for edge in graph["edges"]]


def validate_graph_set(graphs: GraphSet, pool: Optional[FunctionPool] = None) -> list[str]:
    """Return a list of invariant violations; empty when the set is well-formed."""
    problems: list[str] = []
    for key, graph in graphs.items():
        target = graph["target"]
        if key != target:
            problems.append(f"{key}: keyed under a different target {target!r}")
        if target in graph["neighbors"]:
            problems.append(f"{target}: target listed among its own neighbors")
        for edge in graph["edges"]:
            if edge[0] != target or edge[1] not in graph["neighbors"]:
                problems.append(f"{target}: malformed edge {edge}")
        if pool is not None:
            for fid in [target, *graph["neighbors"]]:
                if fid not in pool:
                    problems.append(f"{target}: unknown function {fid!r}")
    return problems
