# SPDX-License-Identifier: MIT

import re
from typing import Optional, Protocol

from fcsynth.errors import BackendError, FcsynthError, InputValidationError
from fcsynth.fclang import FcSyntaxError, parse_fc_answer, validate_args
from fcsynth.logger import get_logger
from fcsynth.model.fc import FcList
from fcsynth.model.fsp import Fsp
from fcsynth.model.function_pool import FunctionPool
from fcsynth.model.function_signature import FunctionSignature
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.translation import (
    FINISH,
    Finish,
    QueryFcTurn,
    ToolOutput,
    TranslatedInstance,
)
from fcsynth.service.concurrency import map_ordered
from fcsynth.service.executor import Executor
from fcsynth.service.function_pool import require_function

logger = get_logger(__name__)

MAX_CALLS_PER_TURN = 3

_ANSWER = re.compile(r"Answer:\s*(.*)\Z", re.DOTALL | re.IGNORECASE)


class InstanceDropped(FcsynthError):
    """Raised when an instance cannot be completed and is left out."""

    def __init__(self, instance_id: str, reason: str) -> None:
        self.instance_id = instance_id
        self.reason = reason
        super().__init__(f"{instance_id}: {reason}")


class TranslationBackend(Protocol):
    def back_translate(
        self,
        history: list[QueryFcTurn],
        functions: list[FunctionSignature],
        candidates: dict[str, list[FunctionSignature]],
        miss: Optional[MissLabel],
        withheld: list[str],
        resume: Optional[MissLabel],
    ) -> str:
        """Return the user query for this turn."""
        ...

    def forth_translate(
        self,
        query: str,
        function: FunctionSignature,
        t_prev: list[ToolOutput],
        history: list[QueryFcTurn],
    ) -> str:
        """Return raw 'Thought:/Answer:' text for one candidate function."""
        ...


def back_translate(
    backend: TranslationBackend,
    history: list[QueryFcTurn],
    functions: list[FunctionSignature],
    candidates: dict[str, list[FunctionSignature]],
    miss: Optional[MissLabel] = None,
    withheld: Optional[list[str]] = None,
    resume: Optional[MissLabel] = None,
    retries: int = 2,
) -> str:
    if not functions:
        raise InputValidationError("back translation needs at least one function")
    last_error: Optional[Exception] = None
    for _ in range(retries + 1):
        try:
            query = backend.back_translate(
                history, functions, candidates, miss, list(withheld or []), resume
            ).strip()
        except BackendError as e:
            last_error = e
            continue
        if query:
            return query
        last_error = BackendError("empty query")
    raise BackendError(f"back translation failed after {retries + 1} attempts: {last_error}")


def parse_forth_answer(text: str) -> FcList | Finish:
    match = _ANSWER.search(text)
    answer = (match.group(1) if match else text).strip()
    if answer.upper().startswith(FINISH):
        return FINISH
    return parse_fc_answer(answer)


def check_forth_calls(calls: FcList, sig: FunctionSignature) -> None:
    if not calls:
        raise InputValidationError(f"{sig['api_name']}: answer holds no call")
    if len(calls) > MAX_CALLS_PER_TURN:
        raise InputValidationError(
            f"{sig['api_name']}: {len(calls)} parallel calls, at most {MAX_CALLS_PER_TURN}"
        )
    for call in calls:
        if call["name"] != sig["api_name"]:
            raise InputValidationError(
                f"answer calls {call['name']!r} instead of {sig['api_name']!r}"
            )
        report = validate_args(call, sig)
        if not report["ok"]:
            raise InputValidationError(
                f"{sig['api_name']}: missing={report['missing_required']} "
                f"unknown={report['unknown']} mismatched={report['type_mismatched']}"
            )


def forth_translate(
    backend: TranslationBackend,
    query: str,
    function: FunctionSignature,
    t_prev: list[ToolOutput],
    history: list[QueryFcTurn],
    retries: int = 2,
) -> FcList | Finish:
    last_error: Optional[Exception] = None
    for _ in range(retries + 1):
        try:
            result = parse_forth_answer(
                backend.forth_translate(query, function, t_prev, history)
            )
            if result == FINISH:
                return FINISH
            check_forth_calls(result, function)
            return result
        except (BackendError, FcSyntaxError, InputValidationError) as e:
            logger.warning("forth translation of %s rejected: %s", function["api_name"], e)
            last_error = e
    raise BackendError(
        f"forth translation of {function['api_name']} failed after {retries + 1} attempts: {last_error}"
    )


def _miss_target(fsp: Fsp, index: int) -> list[str]:
    turns = fsp["turns"]
    for turn in turns[index + 1 :]:
        if turn["functions"]:
            return list(turn["functions"])
    for turn in reversed(turns[:index]):
        if turn["functions"]:
            return list(turn["functions"])
    return []


def _candidates(
    history: list[QueryFcTurn], functions: list[FunctionSignature]
) -> dict[str, list[FunctionSignature]]:
    last_names = [call["name"] for call in history[-1]["reference_calls"]] if history else []
    keys = list(dict.fromkeys(last_names)) or ["[Start]"]
    return {key: list(functions) for key in keys}


def withheld_params(sig: FunctionSignature) -> list[str]:
    required = sig["parameters"]["required"]
    if required:
        return [required[-1]]
    optional = sig["parameters"]["optional"]
    return [optional[-1]] if optional else []


def _truncate(
    fsp: Fsp, turns: list[QueryFcTurn], at: int, min_turns: int, reason: str
) -> list[QueryFcTurn]:
    kept = turns[:at]
    if len(kept) < min_turns:
        raise InstanceDropped(fsp["id"], reason)
    logger.info("%s: truncated to %d turns (%s)", fsp["id"], len(kept), reason)
    return kept


def translate_fsp(
    fsp: Fsp,
    pool: FunctionPool,
    backend: TranslationBackend,
    executor: Executor,
    translation_seed: int = 0,
    min_turns: int = 2,
    retries: int = 2,
) -> TranslatedInstance:
    """Translate turn by turn; each turn's calls run before the next turn is written."""
    turns: list[QueryFcTurn] = []
    initial: list[str] = []
    announced: set[str] = set()
    pending: set[str] = set()
    previous_miss: Optional[MissLabel] = None
    previous_withheld: list[str] = []

    for index, group in enumerate(fsp["turns"]):
        miss = group["miss_label"]
        t_prev = turns[-1]["outputs"] if turns else []

        if miss is not None:
            targets = _miss_target(fsp, index)
            if not targets:
                raise InstanceDropped(fsp["id"], "miss turn without any function to target")
            sigs = [require_function(pool, fid) for fid in targets]
            withheld: list[str] = []
            if miss == MissLabel.MISS_FUNC:
                withheld = [fid for fid in targets if fid not in initial and fid not in announced]
                if not withheld:
                    logger.info(
                        "%s: turn %d targets functions already offered, asking for params instead",
                        fsp["id"],
                        index,
                    )
                    miss = MissLabel.MISS_PARAMS
                pending.update(withheld)
            if miss == MissLabel.MISS_PARAMS:
                withheld = withheld_params(sigs[0])
            try:
                query = back_translate(
                    backend, turns, sigs, _candidates(turns, sigs), miss, withheld, None, retries
                )
            except BackendError as e:
                raise InstanceDropped(fsp["id"], f"back translation failed: {e}") from e
            turns.append(
                {
                    "index": index,
                    "query": query,
                    "miss_label": miss,
                    "targets": targets,
                    "withheld": withheld,
                    "added_functions": [],
                    "reference_calls": [],
                    "outputs": [],
                }
            )
            previous_miss, previous_withheld = miss, withheld
            continue

        sigs = [require_function(pool, fid) for fid in group["functions"]]
        added = [fid for fid in dict.fromkeys(group["functions"]) if fid in pending]
        pending.difference_update(added)
        announced.update(added)
        for fid in group["functions"]:
            if fid not in initial and fid not in announced and fid not in pending:
                initial.append(fid)

        resume_withheld = previous_withheld if previous_miss else []
        try:
            query = back_translate(
                backend,
                turns,
                sigs,
                _candidates(turns, sigs),
                None,
                resume_withheld,
                previous_miss,
                retries,
            )
        except BackendError as e:
            raise InstanceDropped(fsp["id"], f"back translation failed: {e}") from e

        calls: FcList = []
        outputs: list[ToolOutput] = []
        finished = False
        for sig in sigs:
            try:
                result = forth_translate(backend, query, sig, t_prev + outputs, turns, retries)
            except BackendError as e:
                raise InstanceDropped(fsp["id"], f"turn {index}: {e}") from e
            if result == FINISH:
                finished = True
                break
            if len(calls) + len(result) > MAX_CALLS_PER_TURN:
                raise InstanceDropped(
                    fsp["id"], f"turn {index}: more than {MAX_CALLS_PER_TURN} calls"
                )
            for call in result:
                calls.append(call)
                outputs.append(executor.execute(call, sig))

        if finished:
            turns = _truncate(fsp, turns, len(turns), min_turns, f"FINISH at turn {index}")
            break

        turns.append(
            {
                "index": index,
                "query": query,
                "miss_label": None,
                "targets": list(group["functions"]),
                "withheld": resume_withheld,
                "added_functions": added,
                "reference_calls": calls,
                "outputs": outputs,
            }
        )
        previous_miss, previous_withheld = None, []

    if len(turns) < min_turns:
        raise InstanceDropped(fsp["id"], f"only {len(turns)} turns, need {min_turns}")

    return {
        "id": fsp["id"],
        "functions": initial,
        "turns": turns,
        "source_fsp_seed": fsp["provenance"]["seed"],
        "translation_seed": translation_seed,
        "provenance": {
            "seed": fsp["provenance"]["seed"],
            "start": fsp["provenance"]["start"],
            "ops": list(fsp["provenance"]["ops"]),
        },
    }


def translate_all(
    fsps: list[Fsp],
    pool: FunctionPool,
    backend: TranslationBackend,
    executor: Executor,
    translation_seed: int = 0,
    min_turns: int = 2,
    retries: int = 2,
    jobs: Optional[int] = None,
) -> tuple[list[TranslatedInstance], list[InstanceDropped]]:
    def run(fsp: Fsp) -> TranslatedInstance | InstanceDropped:
        try:
            return translate_fsp(
                fsp, pool, backend, executor, translation_seed, min_turns, retries
            )
        except InstanceDropped as e:
            logger.warning("dropped %s", e)
            return e

    kept: list[TranslatedInstance] = []
    dropped: list[InstanceDropped] = []
    for result in map_ordered(run, fsps, jobs):
        if isinstance(result, InstanceDropped):
            dropped.append(result)
        else:
            kept.append(result)
    return (kept, dropped)
