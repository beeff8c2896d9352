# SPDX-License-Identifier: MIT

import random
from copy import deepcopy
from typing import Optional, Protocol, TypedDict

from fcsynth.errors import BackendError, InputValidationError
from fcsynth.llm.prompts import parse_yes_no_line
from fcsynth.logger import get_logger
from fcsynth.model.dependency_graph import GraphSet
from fcsynth.model.fsp import Fsp, TurnGroup
from fcsynth.model.miss_label import MissLabel
from fcsynth.service.concurrency import derive_rng, map_ordered
from fcsynth.template.fsp import get_turn_group_template

logger = get_logger(__name__)


class NestedJudge(Protocol):
    def judge(self, first: str, second: str) -> str:
        """Return the raw two-line answer for whether second nests on first."""
        ...


class EnhanceConfig(TypedDict):
    merge_p: float
    q_long: float
    miss_label: Optional[MissLabel]  # None draws uniformly


def get_enhance_config_template() -> EnhanceConfig:
    return {"merge_p": 0.3, "q_long": 0.5, "miss_label": None}


def _has_miss(fsp: Fsp) -> bool:
    return any(turn["miss_label"] is not None for turn in fsp["turns"])


def _with_turns(fsp: Fsp, turns: list[TurnGroup], op: str, fsp_id: Optional[str] = None) -> Fsp:
    out = deepcopy(fsp)
    out["turns"] = turns
    out["provenance"]["ops"] = [*fsp["provenance"]["ops"], op]
    if fsp_id is not None:
        out["id"] = fsp_id
    return out


def op_merge(fsp: Fsp, p: float, rng: random.Random) -> Fsp:
    if _has_miss(fsp):
        raise InputValidationError(f"{fsp['id']}: merge runs before split")
    if not 0.0 <= p <= 1.0:
        raise ValueError("merge probability must lie in [0, 1]")

    turns = fsp["turns"]
    merged: list[TurnGroup] = []
    i = 0
    while i < len(turns):
        if i + 1 < len(turns) and rng.random() < p:
            merged.append(
                get_turn_group_template(turns[i]["functions"] + turns[i + 1]["functions"])
            )
            i += 2
        else:
            merged.append(get_turn_group_template(turns[i]["functions"]))
            i += 1
    return _with_turns(fsp, merged, "merge")


def _nested(judge: NestedJudge, first: str, second: str) -> bool:
    flag, _ = parse_yes_no_line(judge.judge(first, second))
    return flag


def op_insert(
    fsp: Fsp,
    graphs: GraphSet,
    nested_judge: NestedJudge,
    q_long: float,
    rng: random.Random,
) -> Fsp:
    if _has_miss(fsp):
        raise InputValidationError(f"{fsp['id']}: insert runs before split")

    turns = [get_turn_group_template(turn["functions"]) for turn in fsp["turns"]]
    total = len(turns)
    appended: dict[int, str] = {}
    # slot j means "right after original turn j"
    later: list[tuple[int, int, str]] = []

    for h, turn in enumerate(turns):
        if not turn["functions"]:
            continue
        last = turn["functions"][-1]
        graph = graphs.get(last)
        if graph is None or not graph["neighbors"]:
            continue
        neighbors = list(graph["neighbors"])
        rng.shuffle(neighbors)

        chosen: Optional[str] = None
        try:
            for candidate in neighbors:
                if candidate in turn["functions"]:
                    continue
                if _nested(nested_judge, last, candidate):
                    chosen = candidate
                    break
        except BackendError as e:
            logger.warning("%s: nested judgement for turn %d skipped (%s)", fsp["id"], h, e)
            continue
        if chosen is None:
            continue

        if rng.random() < q_long:
            later.append((rng.randrange(h, total), h, chosen))
        else:
            appended[h] = chosen

    out: list[TurnGroup] = []
    for j, turn in enumerate(turns):
        functions = list(turn["functions"])
        if j in appended:
            functions.append(appended[j])
        out.append(get_turn_group_template(functions))
        for _, _, function_id in sorted(item for item in later if item[0] == j):
            out.append(get_turn_group_template([function_id]))
    return _with_turns(fsp, out, "insert")


def op_split(
    fsp: Fsp,
    rng: random.Random,
    miss_label: Optional[MissLabel] = None,
    fsp_id: Optional[str] = None,
) -> Fsp:
    if not fsp["turns"]:
        raise InputValidationError(f"{fsp['id']}: cannot split an empty FSP")
    if _has_miss(fsp):
        raise InputValidationError(f"{fsp['id']}: FSP already has a miss-labeled turn")

    h = rng.randrange(len(fsp["turns"]))
    label = rng.choice([MissLabel.MISS_PARAMS, MissLabel.MISS_FUNC])
    if miss_label is not None:
        label = miss_label
    turns = [get_turn_group_template(turn["functions"]) for turn in fsp["turns"]]
    turns.insert(h + 1, get_turn_group_template(miss_label=label))
    return _with_turns(fsp, turns, "split", fsp_id)


def enhance(
    fsp: Fsp,
    graphs: GraphSet,
    nested_judge: NestedJudge,
    cfg: EnhanceConfig,
    rng: random.Random,
) -> tuple[Fsp, Fsp]:
    phi = op_insert(op_merge(fsp, cfg["merge_p"], rng), graphs, nested_judge, cfg["q_long"], rng)
    phi_hat = op_split(phi, rng, cfg["miss_label"], fsp_id=f"{fsp['id']}:miss")
    return (phi, phi_hat)


def enhance_all(
    fsps: list[Fsp],
    graphs: GraphSet,
    nested_judge: NestedJudge,
    cfg: EnhanceConfig,
    seed: int,
    jobs: Optional[int] = None,
) -> list[Fsp]:
    """Enhance every FSP with its own derived generator; output interleaves φ and φ̂."""

    def run(fsp: Fsp) -> tuple[Fsp, Fsp]:
        return enhance(fsp, graphs, nested_judge, cfg, derive_rng(seed, fsp["id"]))

    out: list[Fsp] = []
    for phi, phi_hat in map_ordered(run, fsps, jobs):
        out.extend([phi, phi_hat])
    return out


def function_sequence(fsp: Fsp) -> list[str]:
    return [fid for turn in fsp["turns"] for fid in turn["functions"]]
