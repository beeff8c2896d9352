# SPDX-License-Identifier: MIT

"""Hint-based context distillation into positive and negative trajectories."""

import json
import random
from copy import deepcopy
from typing import Any, Literal, Optional, TypedDict

from fcsynth.errors import BackendError, InputValidationError
from fcsynth.fclang import parse_fc_answer, serialize_fc_list, serialize_hint_calls, try_parse_fc_list
from fcsynth.llm.backend import ChatBackend
from fcsynth.llm.prompts import JudgmentError, parse_yes_no_line, render, render_text
from fcsynth.llm.retry import complete_with_retry
from fcsynth.logger import get_logger
from fcsynth.model.chat import ChatMessage, ChatParams
from fcsynth.model.data_type import DataType
from fcsynth.model.fc import FcList
from fcsynth.model.function_pool import FunctionPool
from fcsynth.model.function_signature import FunctionSignature
from fcsynth.model.hint import (
    HINT_MARKER,
    MISS_FUNCTION_HINT,
    MISS_PARAMS_HINT,
    Hint,
    HintKind,
)
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.prompt_id import PromptId
from fcsynth.model.trajectory import (
    ErrorType,
    MinedHint,
    Polarity,
    Step,
    Trajectory,
    TrajectoryPair,
    Turn,
    TurnJudgement,
)
from fcsynth.model.translation import DroppedInstance, QueryFcTurn, ToolOutput, TranslatedInstance
from fcsynth.service.concurrency import derive_rng, map_ordered
from fcsynth.service.executor import SimulatedExecutor
from fcsynth.service.function_pool import prompt_view, require_function
from fcsynth.service.translation import InstanceDropped
from fcsynth.template.trajectory import get_trajectory_template, get_turn_template

logger = get_logger(__name__)

HINT_TAG = "[Hint]"
NEW_FUNCTIONS_NOTE = "The following functions are now available as well:"

MISS_PARAMS_REPLY = (
    "Some required information for this request is missing. Could you provide it?"
)
MISS_FUNCTION_REPLY = (
    "None of the available functions can handle this request; "
    "the function needed for it is missing."
)


class PairingError(InputValidationError):
    """Raised when two trajectories do not form a valid preference pair."""

    pass


class NegativeSamplingError(InputValidationError):
    """Raised when a negative is requested without any misleading hint."""

    pass


class DistillConfig(TypedDict):
    max_steps: int
    one_at_a_time: bool
    retries: int
    rollouts: int
    rollout_temperature: float
    selection: Literal["first", "random"]


def get_distill_config_template() -> DistillConfig:
    return {
        "max_steps": 8,
        "one_at_a_time": False,
        "retries": 2,
        "rollouts": 10,
        "rollout_temperature": 1.0,
        "selection": "first",
    }


class HintedTurn(TypedDict):
    query: str
    hint: Hint
    added_functions: list[FunctionSignature]


class HintedConversation(TypedDict):
    id: str
    system_functions: list[FunctionSignature]
    turns: list[HintedTurn]
    provenance: dict[str, Any]


def functions_json(functions: list[FunctionSignature]) -> str:
    return json.dumps([prompt_view(sig) for sig in functions], ensure_ascii=False)


def hint_for_turn(turn: QueryFcTurn) -> Hint:
    if turn["miss_label"] == MissLabel.MISS_FUNC:
        return {"kind": HintKind.MISS_FUNCTION, "content": MISS_FUNCTION_HINT}
    if turn["miss_label"] == MissLabel.MISS_PARAMS:
        return {"kind": HintKind.MISS_PARAMS, "content": MISS_PARAMS_HINT}
    return {"kind": HintKind.CORRECT, "content": serialize_hint_calls(turn["reference_calls"])}


def hinted_user_text(query: str, hint: Optional[Hint]) -> str:
    if hint is None:
        return query
    return f"{query}\n{HINT_MARKER} {hint['content']}"


def _provenance(instance: TranslatedInstance) -> dict[str, Any]:
    return {
        "instance": instance["id"],
        "start": instance["provenance"]["start"],
        "walk_seed": instance["source_fsp_seed"],
        "ops": list(instance["provenance"]["ops"]),
        "translation_seed": instance["translation_seed"],
    }


def inject_hints(instance: TranslatedInstance, pool: FunctionPool) -> HintedConversation:
    if not instance["turns"]:
        raise InputValidationError(f"{instance['id']}: no turns")
    return {
        "id": instance["id"],
        "system_functions": [require_function(pool, fid) for fid in instance["functions"]],
        "turns": [
            {
                "query": turn["query"],
                "hint": hint_for_turn(turn),
                "added_functions": [
                    require_function(pool, fid) for fid in turn["added_functions"]
                ],
            }
            for turn in instance["turns"]
        ],
        "provenance": _provenance(instance),
    }


def _announce(functions: list[FunctionSignature]) -> ChatMessage:
    return {"role": "system", "content": f"{NEW_FUNCTIONS_NOTE}\n{functions_json(functions)}"}


def _tool_message(output: ToolOutput) -> ChatMessage:
    content = json.dumps(
        {"name": output["call"]["name"], "output": output["payload"]},
        ensure_ascii=False,
        sort_keys=True,
    )
    return {"role": "tool", "content": content}


def _system_message(functions: list[FunctionSignature], hinted: bool) -> ChatMessage:
    template = PromptId.POSITIVE_DISTILL if hinted else PromptId.SYSTEM_PROMPT
    return {
        "role": "system",
        "content": render_text(template, {"functions": functions_json(functions)}),
    }


def turn_messages(turn: Turn) -> list[ChatMessage]:
    messages: list[ChatMessage] = []
    if turn["added_functions"]:
        messages.append(_announce(turn["added_functions"]))
    messages.append({"role": "user", "content": hinted_user_text(turn["query"], turn["hint"])})
    for step in turn["steps"]:
        messages.append({"role": "assistant", "content": step["action"]})
        messages.extend(_tool_message(output) for output in step["tool_outputs"])
    return messages


def to_messages(traj: Trajectory) -> tuple[list[ChatMessage], list[list[int]]]:
    """Flatten a trajectory into chat messages plus the per-turn assistant indices."""
    hinted = any(turn["hint"] is not None for turn in traj["turns"])
    messages: list[ChatMessage] = [_system_message(traj["system_functions"], hinted)]
    spans: list[list[int]] = []
    for turn in traj["turns"]:
        start = len(messages)
        messages.extend(turn_messages(turn))
        spans.append(
            [i for i in range(start, len(messages)) if messages[i]["role"] == "assistant"]
        )
    return (messages, spans)


def _signature_lookup(
    system_functions: list[FunctionSignature], turns: list[HintedTurn]
) -> dict[str, FunctionSignature]:
    lookup = {sig["api_name"]: sig for sig in system_functions}
    for turn in turns:
        for sig in turn["added_functions"]:
            lookup[sig["api_name"]] = sig
    return lookup


def _next_action(
    backend: ChatBackend,
    messages: list[ChatMessage],
    params: ChatParams,
    retries: int,
    instance_id: str,
) -> tuple[str, Optional[FcList]]:
    problem = ""
    for _ in range(retries + 1):
        try:
            action = complete_with_retry(backend, messages, params, max_retries=retries).strip()
        except BackendError as e:
            raise InstanceDropped(instance_id, f"backend failed: {e}") from e
        if HINT_TAG in action:
            problem = "action mentions the hint marker"
            continue
        if not action:
            problem = "empty action"
            continue
        if action.startswith("["):
            calls = try_parse_fc_list(action)
            if calls is None:
                problem = "action is not a parseable call list"
                continue
            return (action, calls if calls else None)
        return (action, None)
    raise InstanceDropped(instance_id, f"unusable action after {retries + 1} attempts: {problem}")


def _roll_out(
    backend: ChatBackend,
    conversation: HintedConversation,
    executor: SimulatedExecutor,
    cfg: DistillConfig,
    polarity: Polarity,
    params: Optional[ChatParams] = None,
) -> Trajectory:
    lookup = _signature_lookup(conversation["system_functions"], conversation["turns"])
    traj = get_trajectory_template(
        conversation["id"],
        conversation["system_functions"],
        polarity,
        provenance=conversation["provenance"],
    )
    messages: list[ChatMessage] = [_system_message(conversation["system_functions"], True)]

    for hinted in conversation["turns"]:
        turn = get_turn_template(hinted["query"], hinted["hint"], hinted["added_functions"])
        if turn["added_functions"]:
            messages.append(_announce(turn["added_functions"]))
        messages.append(
            {"role": "user", "content": hinted_user_text(turn["query"], turn["hint"])}
        )
        for _ in range(cfg["max_steps"]):
            action, calls = _next_action(
                backend, messages, params or {}, cfg["retries"], conversation["id"]
            )
            if calls is None:
                turn["steps"].append({"action": action, "tool_outputs": []})
                messages.append({"role": "assistant", "content": action})
                break
            groups = [[call] for call in calls] if cfg["one_at_a_time"] else [calls]
            for group in groups:
                outputs = [executor.execute(call, lookup.get(call["name"])) for call in group]
                step: Step = {"action": serialize_fc_list(group), "tool_outputs": outputs}
                turn["steps"].append(step)
                messages.append({"role": "assistant", "content": step["action"]})
                messages.extend(_tool_message(output) for output in outputs)
        traj["turns"].append(turn)
    return traj


def sample_positive(
    teacher: ChatBackend,
    hinted: HintedConversation,
    executor: SimulatedExecutor,
    cfg: Optional[DistillConfig] = None,
) -> Trajectory:
    return _roll_out(
        teacher, hinted, executor, cfg or get_distill_config_template(), Polarity.POSITIVE
    )


def reference_action(turn: QueryFcTurn) -> str:
    if turn["miss_label"] == MissLabel.MISS_FUNC:
        return MISS_FUNCTION_REPLY
    if turn["miss_label"] == MissLabel.MISS_PARAMS:
        return MISS_PARAMS_REPLY
    return serialize_fc_list(turn["reference_calls"])


def reference_prefix(
    instance: TranslatedInstance, pool: FunctionPool, upto: int
) -> list[ChatMessage]:
    """Teacher-forced context: reference actions and outputs for turns before upto."""
    functions = [require_function(pool, fid) for fid in instance["functions"]]
    messages: list[ChatMessage] = [_system_message(functions, False)]
    for position, turn in enumerate(instance["turns"][: upto + 1]):
        if turn["added_functions"]:
            messages.append(
                _announce([require_function(pool, fid) for fid in turn["added_functions"]])
            )
        messages.append({"role": "user", "content": turn["query"]})
        if position == upto:
            break
        messages.append({"role": "assistant", "content": reference_action(turn)})
        messages.extend(_tool_message(output) for output in turn["outputs"])
    return messages


def conversation_text(messages: list[ChatMessage]) -> str:
    return "\n".join(f"{message['role']}: {message['content']}" for message in messages)


def parse_judgement(text: str) -> TurnJudgement:
    correct, remainder = parse_yes_no_line(text)
    if correct:
        return {"correct": True, "error_type": None}
    token = remainder.split()[0].strip(".:)") if remainder.split() else ""
    try:
        return {"correct": False, "error_type": ErrorType(token)}
    except ValueError as e:
        raise JudgmentError(f"judge said no without an error type 1-5: {remainder!r}") from e


def judge_turn(
    judge: ChatBackend,
    conversation: list[ChatMessage],
    model_action: str,
    reference: str,
    retries: int = 2,
) -> TurnJudgement:
    messages = render(
        PromptId.NEGATIVE_JUDGE,
        {
            "conversation": conversation_text(conversation),
            "model_response": model_action,
            "reference_response": reference,
        },
    )
    return parse_judgement(complete_with_retry(judge, messages, {}, max_retries=retries))


def mine_negative_hints(
    student: ChatBackend,
    instance: TranslatedInstance,
    judge: ChatBackend,
    k: int,
    pool: FunctionPool,
    cfg: Optional[DistillConfig] = None,
) -> dict[int, list[MinedHint]]:
    if k < 1:
        raise ValueError("k must be at least 1")
    cfg = cfg or get_distill_config_template()
    mined: dict[int, list[MinedHint]] = {}
    for rollout in range(k):
        params: ChatParams = {"temperature": cfg["rollout_temperature"], "seed": rollout}
        for position, turn in enumerate(instance["turns"]):
            if turn["miss_label"] is not None:
                continue
            conversation = reference_prefix(instance, pool, position)
            try:
                action = complete_with_retry(
                    student, conversation, params, max_retries=cfg["retries"]
                ).strip()
                judgement = judge_turn(
                    judge, conversation, action, reference_action(turn), cfg["retries"]
                )
            except BackendError as e:
                logger.warning(
                    "%s: turn %d of rollout %d skipped for mining (%s)",
                    instance["id"],
                    position,
                    rollout,
                    e,
                )
                continue
            if judgement["correct"] or judgement["error_type"] is None:
                continue
            calls = try_parse_fc_list(action)
            if not calls:
                continue
            mined.setdefault(position, []).append(
                {
                    "text": serialize_hint_calls(calls),
                    "error_type": judgement["error_type"],
                    "rollout": rollout,
                }
            )
    return mined


def sample_negative(
    student: ChatBackend,
    instance: TranslatedInstance,
    mined: dict[int, list[MinedHint]],
    executor: SimulatedExecutor,
    pool: FunctionPool,
    cfg: Optional[DistillConfig] = None,
    rng: Optional[random.Random] = None,
) -> Trajectory:
    cfg = cfg or get_distill_config_template()
    options = [(position, hint) for position in sorted(mined) for hint in mined[position]]
    if not options:
        raise NegativeSamplingError(f"{instance['id']}: no misleading hints were mined")

    if cfg["selection"] == "random":
        position, chosen = (rng or random.Random(0)).choice(options)
    else:
        position, chosen = options[0]
    try:
        parse_fc_answer(chosen["text"])
    except InputValidationError as e:
        raise NegativeSamplingError(f"misleading hint does not parse: {e}") from e

    hinted = inject_hints(instance, pool)
    hinted["turns"][position]["hint"] = {"kind": HintKind.MISLEADING, "content": chosen["text"]}
    hinted["provenance"] = {
        **hinted["provenance"],
        "misleading_turn": position,
        "error_type": str(chosen["error_type"]),
        "rollout": chosen["rollout"],
    }
    return _roll_out(student, hinted, executor, cfg, Polarity.NEGATIVE)


def strip_hints(traj: Trajectory) -> Trajectory:
    stripped = deepcopy(traj)
    for turn in stripped["turns"]:
        turn["hint"] = None
        if HINT_TAG in turn["query"]:
            turn["query"] = turn["query"].split(HINT_TAG, 1)[0].rstrip()
    return stripped


def contains_hint(traj: Trajectory) -> bool:
    messages, _ = to_messages(traj)
    return any(HINT_TAG in message["content"] for message in messages)


def _actions(traj: Trajectory) -> list[list[str]]:
    return [[step["action"] for step in turn["steps"]] for turn in traj["turns"]]


def build_pair(chosen: Trajectory, rejected: Trajectory) -> TrajectoryPair:
    if [s["api_name"] for s in chosen["system_functions"]] != [
        s["api_name"] for s in rejected["system_functions"]
    ]:
        raise PairingError(f"{chosen['id']}: pair members offer different functions")
    if [t["query"] for t in chosen["turns"]] != [t["query"] for t in rejected["turns"]]:
        raise PairingError(f"{chosen['id']}: pair members differ in their queries")
    if _actions(chosen) == _actions(rejected):
        raise PairingError(f"{chosen['id']}: pair members take identical actions")
    return {"id": chosen["id"], "chosen": chosen, "rejected": rejected}


class DistillResult(TypedDict):
    positive: Optional[Trajectory]
    pair: Optional[TrajectoryPair]
    dropped: Optional[str]


def distill_instance(
    instance: TranslatedInstance,
    pool: FunctionPool,
    teacher: ChatBackend,
    executor: SimulatedExecutor,
    cfg: DistillConfig,
    student: Optional[ChatBackend] = None,
    judge: Optional[ChatBackend] = None,
    rng: Optional[random.Random] = None,
) -> DistillResult:
    """Positive trajectory, and a pair when a student and judge are given."""
    try:
        positive = sample_positive(teacher, inject_hints(instance, pool), executor, cfg)
    except InstanceDropped as e:
        return {"positive": None, "pair": None, "dropped": e.reason}
    stripped = strip_hints(positive)

    if student is None or judge is None:
        return {"positive": stripped, "pair": None, "dropped": None}

    mined = mine_negative_hints(student, instance, judge, cfg["rollouts"], pool, cfg)
    if not mined:
        return {"positive": stripped, "pair": None, "dropped": None}
    try:
        negative = sample_negative(student, instance, mined, executor, pool, cfg, rng)
        pair = build_pair(stripped, strip_hints(negative))
    except (InstanceDropped, PairingError) as e:
        logger.warning("%s: no preference pair (%s)", instance["id"], e)
        return {"positive": stripped, "pair": None, "dropped": None}
    return {"positive": stripped, "pair": pair, "dropped": None}


def to_dataset_record(traj: Trajectory) -> dict[str, Any]:
    """Training record: hint-free messages plus the assistant indices of each turn."""
    messages, spans = to_messages(strip_hints(traj))
    return {
        "id": traj["id"],
        "data_type": str(traj["data_type"]),
        "subtype": traj["subtype"],
        "polarity": str(traj["polarity"]),
        "messages": messages,
        "action_spans": spans,
        "provenance": traj["provenance"],
    }


def pair_dataset_record(pair: TrajectoryPair) -> dict[str, Any]:
    return {
        "id": pair["id"],
        "data_type": DataType.PREFERENCE.value,
        "chosen": to_dataset_record(pair["chosen"]),
        "rejected": to_dataset_record(pair["rejected"]),
    }


def distill_all(
    instances: list[TranslatedInstance],
    pool: FunctionPool,
    teacher: ChatBackend,
    executor: SimulatedExecutor,
    cfg: DistillConfig,
    seed: int,
    student: Optional[ChatBackend] = None,
    judge: Optional[ChatBackend] = None,
    jobs: Optional[int] = None,
) -> tuple[list[Trajectory], list[TrajectoryPair], list[DroppedInstance]]:
    def run(instance: TranslatedInstance) -> DistillResult:
        rng = derive_rng(seed, f"negative:{instance['id']}")
        return distill_instance(instance, pool, teacher, executor, cfg, student, judge, rng)

    positives: list[Trajectory] = []
    pairs: list[TrajectoryPair] = []
    dropped: list[DroppedInstance] = []
    for instance, result in zip(instances, map_ordered(run, instances, jobs)):
        if result["dropped"] is not None:
            logger.warning("dropped %s during distillation: %s", instance["id"], result["dropped"])
            dropped.append({"id": instance["id"], "stage": "distill", "reason": result["dropped"]})
            continue
        if result["positive"] is not None:
            positives.append(result["positive"])
        if result["pair"] is not None:
            pairs.append(result["pair"])
    return (positives, pairs, dropped)
