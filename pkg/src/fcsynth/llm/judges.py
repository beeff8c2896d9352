# SPDX-License-Identifier: MIT

"""Adapters that put the chat backend behind the judge and translator interfaces."""

import json
from typing import Optional

from fcsynth.fclang import serialize_fc_list
from fcsynth.llm.backend import ChatBackend
from fcsynth.llm.prompts import render
from fcsynth.llm.retry import complete_with_retry
from fcsynth.model.chat import ChatParams
from fcsynth.model.function_pool import FunctionPool
from fcsynth.model.function_signature import FunctionSignature
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.prompt_id import PromptId
from fcsynth.model.translation import QueryFcTurn, ToolOutput
from fcsynth.service.function_pool import prompt_view, require_function

MISS_PARAMS_NOTE = (
    "Write a query for the functions above but leave out any value for these "
    "required parameters, so the agent has to ask for them: {withheld}"
)
MISS_FUNC_NOTE = (
    "Write a query that needs the functions above. The agent cannot see them yet, "
    "so it will have to say that the functionality is missing."
)
RESUME_PARAMS_NOTE = "In this query, supply the values you held back last round for: {withheld}"
RESUME_FUNC_NOTE = "The functions the agent lacked last round are now available; repeat the request."


def _dumps(data: object) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2)


def format_history(history: list[QueryFcTurn]) -> str:
    if not history:
        return "[Conversation History]:\n(none)"
    lines = ["[Conversation History]:"]
    for position, turn in enumerate(history, start=1):
        prefix = "[Last Round] " if position == len(history) else ""
        lines.append(f"{prefix}Round {position}:")
        lines.append(f"Query: {turn['query']}")
        lines.append(f"Function calls: {serialize_fc_list(turn['reference_calls'])}")
    return "\n".join(lines)


def format_outputs(outputs: list[ToolOutput]) -> str:
    return _dumps(
        [{"name": output["call"]["name"], "output": output["payload"]} for output in outputs]
    )


class _BackendJudge:
    def __init__(
        self,
        backend: ChatBackend,
        params: Optional[ChatParams] = None,
        max_retries: int = 2,
    ) -> None:
        self.backend = backend
        self.params: ChatParams = params or {}
        self.max_retries = max_retries

    def _ask(self, template_id: PromptId, **bindings: object) -> str:
        return complete_with_retry(
            self.backend, render(template_id, bindings), self.params, self.max_retries
        )


class LlmTaxonomyJudge(_BackendJudge):
    def classify(self, sig: FunctionSignature) -> str:
        return self._ask(
            PromptId.DOMAIN_CLASSIFY,
            name=sig["api_name"],
            description=sig["api_description"],
            required=", ".join(sig["parameters"]["required"]) or "(none)",
        )


class LlmDependencyJudge(_BackendJudge):
    def adjacency(self, target: FunctionSignature, candidates: list[FunctionSignature]) -> str:
        return self._ask(
            PromptId.DEPENDENCY_JUDGE,
            target=_dumps(prompt_view(target)),
            candidates=_dumps([prompt_view(sig) for sig in candidates]),
        )


class LlmNestedJudge(_BackendJudge):
    def __init__(
        self,
        backend: ChatBackend,
        pool: FunctionPool,
        params: Optional[ChatParams] = None,
        max_retries: int = 2,
    ) -> None:
        super().__init__(backend, params, max_retries)
        self.pool = pool

    def judge(self, first: str, second: str) -> str:
        return self._ask(
            PromptId.NESTED_JUDGE,
            first=_dumps(prompt_view(require_function(self.pool, first))),
            second=_dumps(prompt_view(require_function(self.pool, second))),
        )


class LlmTranslationBackend(_BackendJudge):
    def back_translate(
        self,
        history: list[QueryFcTurn],
        functions: list[FunctionSignature],
        candidates: dict[str, list[FunctionSignature]],
        miss: Optional[MissLabel],
        withheld: list[str],
        resume: Optional[MissLabel],
    ) -> str:
        offered = {key: [prompt_view(sig) for sig in sigs] for key, sigs in candidates.items()}
        note = ""
        if miss == MissLabel.MISS_PARAMS:
            note = MISS_PARAMS_NOTE.format(withheld=", ".join(withheld))
        elif miss == MissLabel.MISS_FUNC:
            note = MISS_FUNC_NOTE
        elif resume == MissLabel.MISS_PARAMS and withheld:
            note = RESUME_PARAMS_NOTE.format(withheld=", ".join(withheld))
        elif resume == MissLabel.MISS_FUNC:
            note = RESUME_FUNC_NOTE
        asked = {sig["api_name"] for sig in functions}
        used = sorted(
            {call["name"] for turn in history for call in turn["reference_calls"]} - asked
        )
        return self._ask(
            PromptId.BACK_TRANSLATE,
            history=format_history(history),
            candidates=_dumps(offered),
            excluded=_dumps(used),
            note=f"\n{note}" if note else "",
        )

    def forth_translate(
        self,
        query: str,
        function: FunctionSignature,
        t_prev: list[ToolOutput],
        history: list[QueryFcTurn],
    ) -> str:
        return self._ask(
            PromptId.FORTH_TRANSLATE,
            history=format_history(history),
            reference_output=format_outputs(t_prev),
            candidate=_dumps(prompt_view(function)),
            query=query,
        )
