# SPDX-License-Identifier: MIT

"""Shuffling, keyword filtering, mixture assembly and dataset statistics."""

import json
import random
from collections import Counter
from copy import deepcopy
from typing import Any, Iterable, Optional, TypedDict

from fcsynth.errors import InputValidationError
from fcsynth.fclang import try_parse_fc_list
from fcsynth.logger import get_logger
from fcsynth.model.data_type import DataType, SingleTurnSubtype
from fcsynth.model.function_pool import FunctionPool
from fcsynth.model.mixture import DatasetStats, FilterDecision, MixedDataset, MixtureConfig
from fcsynth.model.trajectory import Trajectory, TrajectoryPair
from fcsynth.service.trajectory_distiller import strip_hints, to_dataset_record
from fcsynth.template.mixture import DEFAULT_KEYWORDS
from fcsynth.template.trajectory import get_trajectory_template, get_turn_template

logger = get_logger(__name__)

MIXTURE_TYPES = (DataType.SINGLE_TURN, DataType.MULTI_TURN, DataType.IRRELEVANCE)

IRRELEVANCE_REPLY = (
    "None of the functions available to me can handle this request, "
    "so I can't complete it with a function call."
)


def shuffle_functions(traj: Trajectory, rng: random.Random) -> Trajectory:
    shuffled = deepcopy(traj)
    rng.shuffle(shuffled["system_functions"])
    return shuffled


def shuffle_pair(pair: TrajectoryPair, rng: random.Random) -> TrajectoryPair:
    """Both members get the same permutation so they keep identical tool lists."""
    order = list(range(len(pair["chosen"]["system_functions"])))
    rng.shuffle(order)
    chosen, rejected = deepcopy(pair["chosen"]), deepcopy(pair["rejected"])
    chosen["system_functions"] = [chosen["system_functions"][i] for i in order]
    rejected["system_functions"] = [rejected["system_functions"][i] for i in order]
    return {"id": pair["id"], "chosen": chosen, "rejected": rejected}


def _payload_text(payload: Any) -> str:
    if isinstance(payload, str):
        return payload
    return json.dumps(payload, ensure_ascii=False)


def keyword_filter(traj: Trajectory, keywords: Optional[list[str]] = None) -> FilterDecision:
    """Drop when a tool output holds a failure keyword; turns are numbered from 1."""
    keywords = list(DEFAULT_KEYWORDS) if keywords is None else keywords
    if not keywords:
        raise InputValidationError("keyword filter needs at least one keyword")
    for number, turn in enumerate(traj["turns"], start=1):
        for step in turn["steps"]:
            for output in step["tool_outputs"]:
                text = _payload_text(output["payload"])
                for keyword in keywords:
                    if keyword in text:
                        return {"keep": False, "keyword": keyword, "turn": number}
    return {"keep": True, "keyword": None, "turn": None}


def filter_trajectories(
    trajectories: Iterable[Trajectory], keywords: Optional[list[str]] = None
) -> tuple[list[Trajectory], dict[str, FilterDecision]]:
    kept: list[Trajectory] = []
    dropped: dict[str, FilterDecision] = {}
    for traj in trajectories:
        decision = keyword_filter(traj, keywords)
        if decision["keep"]:
            kept.append(traj)
        else:
            logger.info(
                "%s: dropped, %r in a tool output at turn %s",
                traj["id"],
                decision["keyword"],
                decision["turn"],
            )
            dropped[traj["id"]] = decision
    return (kept, dropped)


def single_turn_subtype(names: list[str]) -> SingleTurnSubtype:
    if len(names) <= 1:
        return SingleTurnSubtype.SINGLE
    if len(set(names)) == 1:
        return SingleTurnSubtype.PARALLEL
    return SingleTurnSubtype.MULTIPLE


def build_single_turn(traj: Trajectory) -> Optional[Trajectory]:
    """First turn that calls functions, as a standalone sample."""
    for turn in strip_hints(traj)["turns"]:
        names = [
            output["call"]["name"] for step in turn["steps"] for output in step["tool_outputs"]
        ]
        if not names:
            continue
        single = get_trajectory_template(
            f"{traj['id']}:single",
            traj["system_functions"] + turn["added_functions"],
            data_type=DataType.SINGLE_TURN,
            provenance={**traj["provenance"], "source": traj["id"]},
        )
        single["subtype"] = single_turn_subtype(names).value
        copy = get_turn_template(turn["query"])
        copy["steps"] = deepcopy(turn["steps"])
        single["turns"].append(copy)
        return single
    return None


def build_irrelevance(
    traj: Trajectory, pool: FunctionPool, n_tools: int, rng: random.Random
) -> Optional[Trajectory]:
    """Pair the first query with tools from unrelated groups; the right answer is a refusal."""
    offered = list(traj["system_functions"]) + [
        sig for turn in traj["turns"] for sig in turn["added_functions"]
    ]
    used = {pool.group_of(sig["id"]) for sig in offered if sig["id"] in pool}
    others = sorted(
        fid for group in pool.groups() if group not in used for fid in pool.group_members(*group)
    )
    if not others or not traj["turns"]:
        return None
    tools = [pool.by_id(fid) for fid in rng.sample(others, min(n_tools, len(others)))]
    sample = get_trajectory_template(
        f"{traj['id']}:irrelevance",
        tools,
        data_type=DataType.IRRELEVANCE,
        provenance={**traj["provenance"], "source": traj["id"]},
    )
    turn = get_turn_template(strip_hints(traj)["turns"][0]["query"])
    turn["steps"].append({"action": IRRELEVANCE_REPLY, "tool_outputs": []})
    sample["turns"].append(turn)
    return sample


def irrelevance_ratio(cfg: MixtureConfig) -> float:
    """Irrelevance share of the mixture, in percent."""
    total = cfg["n_single_turn"] + cfg["n_multi_turn"] + cfg["n_irrelevance"]
    if total == 0:
        raise InputValidationError("empty mixture")
    return 100.0 * cfg["n_irrelevance"] / total


def _requested(cfg: MixtureConfig) -> dict[DataType, int]:
    return {
        DataType.SINGLE_TURN: cfg["n_single_turn"],
        DataType.MULTI_TURN: cfg["n_multi_turn"],
        DataType.IRRELEVANCE: cfg["n_irrelevance"],
    }


def mix(datasets: dict[DataType, list[Trajectory]], cfg: MixtureConfig) -> MixedDataset:
    requested = _requested(cfg)
    if any(count < 0 for count in requested.values()):
        raise InputValidationError("mixture counts must not be negative")
    if sum(requested.values()) == 0:
        raise InputValidationError("empty mixture")
    for data_type, count in requested.items():
        available = len(datasets.get(data_type, []))
        if count > available:
            raise InputValidationError(
                f"insufficient pool for {data_type.value}: need {count}, have {available}"
            )

    rng = random.Random(cfg["seed"])
    chosen: list[Trajectory] = []
    selected: dict[str, list[str]] = {}
    for data_type in MIXTURE_TYPES:
        picked = rng.sample(datasets.get(data_type, []), requested[data_type])
        selected[data_type.value] = [traj["id"] for traj in picked]
        chosen.extend(picked)
    rng.shuffle(chosen)
    return {
        "records": [to_dataset_record(traj) for traj in chosen],
        "manifest": {"config": deepcopy(cfg), "selected": selected, "seed": cfg["seed"]},
    }


def _record_shape(record: dict[str, Any]) -> tuple[int, int]:
    """Turn and call counts of a dataset record; pairs count their chosen side."""
    if record.get("data_type") == DataType.PREFERENCE and "chosen" in record:
        record = record["chosen"]
    calls = 0
    for message in record.get("messages", []):
        if message.get("role") != "assistant":
            continue
        content = str(message.get("content", "")).strip()
        if content.startswith("["):
            calls += len(try_parse_fc_list(content) or [])
    return (len(record.get("action_spans", [])), calls)


def compute_stats(records: Iterable[dict[str, Any]]) -> DatasetStats:
    counts: Counter[str] = Counter()
    subtypes: Counter[str] = Counter()
    turns: Counter[int] = Counter()
    fcs: Counter[int] = Counter()
    for record in records:
        counts[str(record.get("data_type", DataType.MULTI_TURN))] += 1
        if record.get("subtype"):
            subtypes[str(record["subtype"])] += 1
        n_turns, n_calls = _record_shape(record)
        turns[n_turns] += 1
        fcs[n_calls] += 1
    total = sum(counts.values())
    if total == 0:
        raise InputValidationError("no records to summarise")
    if total != sum(turns.values()) or total != sum(fcs.values()):
        raise ValueError("histogram totals disagree with the type counts")
    return {
        "counts": dict(counts),
        "subtypes": dict(subtypes),
        "turns": dict(sorted(turns.items())),
        "fcs": dict(sorted(fcs.items())),
        "total": total,
    }


class PostprocessResult(TypedDict):
    mixed: MixedDataset
    pairs: list[TrajectoryPair]
    filtered: dict[str, FilterDecision]


def build_datasets(
    positives: list[Trajectory], pool: FunctionPool, irrelevance_tools: int, rng: random.Random
) -> dict[DataType, list[Trajectory]]:
    datasets: dict[DataType, list[Trajectory]] = {
        DataType.SINGLE_TURN: [],
        DataType.MULTI_TURN: positives,
        DataType.IRRELEVANCE: [],
    }
    for traj in positives:
        single = build_single_turn(traj)
        if single is not None:
            datasets[DataType.SINGLE_TURN].append(single)
        irrelevant = build_irrelevance(traj, pool, irrelevance_tools, rng)
        if irrelevant is not None:
            datasets[DataType.IRRELEVANCE].append(irrelevant)
    return datasets


def resolve_counts(
    wanted: dict[str, Optional[int]],
    datasets: dict[DataType, list[Trajectory]],
    seed: int,
) -> MixtureConfig:
    """Mixture config where a missing count takes everything available."""

    def count(key: str, data_type: DataType) -> int:
        value = wanted.get(key)
        return len(datasets[data_type]) if value is None else value

    return {
        "n_single_turn": count("n_single_turn", DataType.SINGLE_TURN),
        "n_multi_turn": count("n_multi_turn", DataType.MULTI_TURN),
        "n_irrelevance": count("n_irrelevance", DataType.IRRELEVANCE),
        "seed": seed,
    }


def postprocess(
    positives: list[Trajectory],
    pairs: list[TrajectoryPair],
    pool: FunctionPool,
    wanted: dict[str, Optional[int]],
    seed: int,
    rng: random.Random,
    keywords: Optional[list[str]] = None,
    shuffle: bool = True,
    irrelevance_tools: int = 3,
) -> PostprocessResult:
    """Filter, shuffle, derive the extra sample types and mix."""
    positives, filtered = filter_trajectories(positives, keywords)
    pairs = [pair for pair in pairs if keyword_filter(pair["chosen"], keywords)["keep"]]
    if shuffle:
        positives = [shuffle_functions(traj, rng) for traj in positives]
        pairs = [shuffle_pair(pair, rng) for pair in pairs]
    datasets = build_datasets(positives, pool, irrelevance_tools, rng)
    return {
        "mixed": mix(datasets, resolve_counts(wanted, datasets, seed)),
        "pairs": pairs,
        "filtered": filtered,
    }
