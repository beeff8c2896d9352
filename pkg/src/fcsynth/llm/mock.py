# SPDX-License-Identifier: MIT

"""Deterministic stand-ins for the chat models, used by tests and offline runs."""

import hashlib
import json
import re
import threading
from typing import Any, Mapping, Optional

from fcsynth.fclang import canonical_args, serialize_fc_list, try_parse_fc_list
from fcsynth.fclang.parser import parse_fc_answer
from fcsynth.model.category import DEFAULT_TOOL_CLASS, MISC_CATEGORY
from fcsynth.model.chat import ChatMessage, ChatParams
from fcsynth.model.fc import FcList, FunctionCall, Value
from fcsynth.model.function_pool import FunctionPool
from fcsynth.model.function_signature import FunctionSignature
from fcsynth.model.hint import HINT_MARKER, MISS_FUNCTION_HINT, MISS_PARAMS_HINT
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.translation import QueryFcTurn, ToolOutput
from fcsynth.service.function_pool import require_function, response_fields

MISS_PARAMS_TEXT = "I can do that, but some details are missing. Which values should I use?"
MISS_FUNCTION_TEXT = (
    "I'm sorry, none of the functions I have can do this; the needed functionality is missing."
)
NO_ANSWER_TEXT = "I'm not able to help with that request."

_MODEL_RESPONSE = re.compile(
    r"\[Model Response\]:\n(.*)\n\n\[Reference Response\]:\n(.*)\Z", re.DOTALL
)


def _hash_fraction(*parts: object) -> float:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).hexdigest()
    return int(digest[:12], 16) / float(16**12)


def _words(name: str) -> str:
    return name.replace("_", " ").strip()


def reference_key(queries: list[str]) -> str:
    return "\n".join(query.strip() for query in queries)


def _user_queries(messages: list[ChatMessage]) -> list[str]:
    return [m["content"].split(HINT_MARKER, 1)[0] for m in messages if m["role"] == "user"]


def _turn_tail(messages: list[ChatMessage]) -> tuple[str, list[ChatMessage]]:
    """Last user text and the messages that follow it."""
    for index in range(len(messages) - 1, -1, -1):
        if messages[index]["role"] == "user":
            return (messages[index]["content"], messages[index + 1 :])
    return ("", [])


def _calls_made(tail: list[ChatMessage]) -> list[FunctionCall]:
    calls: list[FunctionCall] = []
    for message in tail:
        if message["role"] == "assistant":
            calls.extend(try_parse_fc_list(message["content"]) or [])
    return calls


def _summary(tail: list[ChatMessage]) -> str:
    names = []
    for message in tail:
        if message["role"] == "tool":
            try:
                names.append(str(json.loads(message["content"]).get("name", "")))
            except (json.JSONDecodeError, AttributeError):
                continue
    if not names:
        return "All done."
    return "I have finished the request using " + ", ".join(dict.fromkeys(names)) + "."


class HintEchoBackend:
    """Follows the hint: calls its functions, then summarises the outputs."""

    def __init__(self, one_at_a_time: bool = False) -> None:
        self.one_at_a_time = one_at_a_time

    def answer_hint(self, hint: str, tail: list[ChatMessage]) -> str:
        if hint == MISS_FUNCTION_HINT:
            return MISS_FUNCTION_TEXT
        if hint == MISS_PARAMS_HINT:
            return MISS_PARAMS_TEXT
        calls = parse_fc_answer(hint)
        made = len(_calls_made(tail))
        if made >= len(calls):
            return _summary(tail)
        if self.one_at_a_time:
            return serialize_fc_list([calls[made]])
        if made == 0:
            return serialize_fc_list(calls)
        return serialize_fc_list(calls[made:])

    def answer_plain(
        self, messages: list[ChatMessage], tail: list[ChatMessage], params: ChatParams
    ) -> str:
        return NO_ANSWER_TEXT if not tail else _summary(tail)

    def complete(self, messages: list[ChatMessage], params: ChatParams) -> str:
        user_text, tail = _turn_tail(messages)
        if HINT_MARKER in user_text:
            hint = user_text.split(HINT_MARKER, 1)[1]
            return self.answer_hint(hint.strip(), tail)
        return self.answer_plain(messages, tail, params)


def _perturb_value(value: Value) -> Value:
    match value:
        case bool():
            return not value
        case int():
            return value + 1
        case float():
            return value + 1.0
        case str():
            return f"{value}_other"
        case list():
            return value[:-1]
        case _:
            return "unknown"


def perturb_calls(calls: FcList, salt: float) -> FcList:
    """A plausible mistake: drop the last call, or change one argument."""
    if len(calls) > 1 and salt < 0.5:
        return calls[:-1]
    first = calls[0]
    if not first["args"]:
        return calls[1:]
    name = sorted(first["args"])[0]
    args = dict(first["args"])
    args[name] = _perturb_value(args[name])
    return [{"name": first["name"], "args": args}, *calls[1:]]


class ReferenceStudentBackend(HintEchoBackend):
    """Answers unhinted queries from a reference table, wrong some of the time."""

    def __init__(
        self,
        references: Mapping[str, str],
        error_rate: float = 0.3,
        one_at_a_time: bool = False,
    ) -> None:
        super().__init__(one_at_a_time)
        self.references = dict(references)
        self.error_rate = error_rate

    def answer_plain(
        self, messages: list[ChatMessage], tail: list[ChatMessage], params: ChatParams
    ) -> str:
        if tail:
            return _summary(tail)
        query = reference_key(_user_queries(messages))
        reference = self.references.get(query)
        if reference is None:
            return NO_ANSWER_TEXT
        calls = try_parse_fc_list(reference)
        seed = params.get("seed", 0)
        if not calls or _hash_fraction(query, seed, "wrong") >= self.error_rate:
            return reference
        wrong = perturb_calls(calls, _hash_fraction(query, seed, "how"))
        return serialize_fc_list(wrong) if wrong else NO_ANSWER_TEXT


def _call_key(calls: FcList) -> list[tuple[str, str]]:
    return sorted((call["name"], canonical_args(call)) for call in calls)


class HeuristicJudgeBackend:
    """Compares model and reference responses structurally, speaking the yes/no protocol."""

    def complete(self, messages: list[ChatMessage], params: ChatParams) -> str:
        match = _MODEL_RESPONSE.search(messages[-1]["content"])
        if match is None:
            return "unsure"
        model, reference = match.group(1).strip(), match.group(2).strip()
        model_calls = try_parse_fc_list(model) if model.startswith("[") else None
        reference_calls = try_parse_fc_list(reference) if reference.startswith("[") else None

        if (model_calls is None) != (reference_calls is None):
            return "no\n5"
        if model_calls is None or reference_calls is None:
            return "yes" if model.strip() == reference.strip() else "no\n4"
        if _call_key(model_calls) == _call_key(reference_calls):
            return "yes"
        if len(model_calls) < len(reference_calls):
            return "no\n1"
        return "no\n2"


class ScriptedBackend:
    """Replays a fixed list of answers, one per call."""

    def __init__(self, answers: list[str]) -> None:
        self.answers = list(answers)
        self.calls: list[list[ChatMessage]] = []
        self._lock = threading.Lock()

    def complete(self, messages: list[ChatMessage], params: ChatParams) -> str:
        with self._lock:
            self.calls.append(list(messages))
            if not self.answers:
                raise RuntimeError("scripted backend ran out of answers")
            return self.answers.pop(0)


def _names_param(field: str, param: str) -> bool:
    return field.lower() == param.lower()


class RuleDependencyJudge:
    """Edge target -> candidate when a response field of the target names a candidate parameter."""

    def adjacency(self, target: FunctionSignature, candidates: list[FunctionSignature]) -> str:
        fields = [field for field, _ in response_fields(target)]
        related = [
            sig["api_name"]
            for sig in candidates
            if sig["api_name"] != target["api_name"]
            and any(
                _names_param(field, param)
                for field in fields
                for param in sig["parameters"]["properties"]
            )
        ]
        return json.dumps({target["api_name"]: related})


class RuleNestedJudge:
    """Nested when a response field of the first function names a required parameter of the second."""

    def __init__(self, pool: FunctionPool) -> None:
        self.pool = pool

    def judge(self, first: str, second: str) -> str:
        fields = [field for field, _ in response_fields(require_function(self.pool, first))]
        required = require_function(self.pool, second)["parameters"]["required"]
        for field in fields:
            for param in required:
                if _names_param(field, param):
                    return f"yes\n{param} comes from the {field} output"
        return "no\nno output feeds a required parameter"


class MappingTaxonomyJudge:
    def __init__(self, labels: Mapping[str, tuple[str, str]]) -> None:
        self.labels = dict(labels)

    def classify(self, sig: FunctionSignature) -> str:
        category, tool_class = self.labels.get(
            sig["api_name"], (MISC_CATEGORY, DEFAULT_TOOL_CLASS)
        )
        return f"{category}\n{tool_class}"


_PLACEHOLDERS: dict[str, Any] = {
    "integer": 3,
    "number": 2.5,
    "boolean": True,
    "array": ["item"],
    "object": "default settings",
}


def _fits(value: Any, param_type: str) -> bool:
    match param_type:
        case "string":
            return isinstance(value, str)
        case "integer":
            return isinstance(value, int) and not isinstance(value, bool)
        case "number":
            return isinstance(value, (int, float)) and not isinstance(value, bool)
        case "boolean":
            return isinstance(value, bool)
        case "array":
            return isinstance(value, list)
        case _:
            return value is not None


def _placeholder(param: str, param_type: str) -> Any:
    if param_type == "string":
        return f"sample {_words(param)}"
    return _PLACEHOLDERS.get(param_type, f"sample {_words(param)}")


def _stated_values(query: str, param: str) -> list[Any]:
    """Every JSON value written as `param=<value>` in the query."""
    decoder = json.JSONDecoder()
    values = []
    for match in re.finditer(rf"(?<!\w){re.escape(param)}=", query):
        try:
            value, _ = decoder.raw_decode(query, match.end())
        except json.JSONDecodeError:
            continue
        values.append(value)
    return values


class TemplateTranslationBackend:
    """
    Writes template queries that spell out the required values the context
    cannot supply, and answers with calls that take those values back out of
    the query or from earlier outputs.
    """

    def __init__(self) -> None:
        self.seen_t_prev: list[tuple[str, list[ToolOutput]]] = []
        self._lock = threading.Lock()

    def _ask(
        self,
        sig: FunctionSignature,
        earlier: list[FunctionSignature],
        history: list[QueryFcTurn],
        leave_out: set[str],
        supply: set[str],
    ) -> str:
        properties = sig["parameters"]["properties"]
        stated: list[str] = []
        for param in sig["parameters"]["required"]:
            if param in leave_out:
                continue
            param_type = properties[param]["type"]
            known = self._lookup(param, param_type, [], history)
            nested = any(
                _names_param(field, param)
                for prior in earlier
                for field, _ in response_fields(prior)
            )
            if param in supply:
                value = known if known is not None else _placeholder(param, param_type)
            elif known is not None or nested:
                continue
            else:
                value = _placeholder(param, param_type)
            stated.append(f"{param}={json.dumps(value, ensure_ascii=False)}")
        phrase = _words(sig["api_name"])
        return f"{phrase} with {', '.join(stated)}" if stated else phrase

    def back_translate(
        self,
        history: list[QueryFcTurn],
        functions: list[FunctionSignature],
        candidates: dict[str, list[FunctionSignature]],
        miss: Optional[MissLabel],
        withheld: list[str],
        resume: Optional[MissLabel],
    ) -> str:
        leave_out = set(withheld) if miss == MissLabel.MISS_PARAMS else set()
        supply = set(withheld) if resume == MissLabel.MISS_PARAMS else set()
        asks = " and then ".join(
            self._ask(sig, functions[:position], history, leave_out, supply)
            for position, sig in enumerate(functions)
        )
        round_no = len(history) + 1
        if miss == MissLabel.MISS_PARAMS:
            return f"Round {round_no}: I want to {asks}, but I will tell you the rest later."
        if miss == MissLabel.MISS_FUNC:
            return f"Round {round_no}: Can you {asks} for me?"
        if resume == MissLabel.MISS_PARAMS and withheld:
            detail = ", ".join(_words(name) for name in withheld)
            return f"Round {round_no}: Here is the {detail} you needed, please {asks}."
        if resume == MissLabel.MISS_FUNC:
            return f"Round {round_no}: You can now {asks}, please go ahead."
        return f"Round {round_no}: Please {asks} using what we have so far."

    def _lookup(
        self, param: str, param_type: str, outputs: list[ToolOutput], history: list[QueryFcTurn]
    ) -> Any:
        scopes = [outputs] + [turn["outputs"] for turn in reversed(history)]
        for scope in scopes:
            for output in reversed(scope):
                payload = output["payload"]
                if not isinstance(payload, dict) or output["is_error"]:
                    continue
                for field, value in payload.items():
                    if _names_param(field, param) and _fits(value, param_type):
                        return value
        return None

    def forth_translate(
        self,
        query: str,
        function: FunctionSignature,
        t_prev: list[ToolOutput],
        history: list[QueryFcTurn],
    ) -> str:
        with self._lock:
            self.seen_t_prev.append((function["api_name"], list(t_prev)))
        args: dict[str, Any] = {}
        for param in function["parameters"]["required"]:
            param_type = function["parameters"]["properties"][param]["type"]
            value = self._lookup(param, param_type, t_prev, history)
            if value is None:
                value = next(
                    (v for v in _stated_values(query, param) if _fits(v, param_type)),
                    _placeholder(param, param_type),
                )
            args[param] = value
        call: FunctionCall = {"name": function["api_name"], "args": args}
        return f"Thought:\nfill {function['api_name']} from the context\nAnswer:\n{serialize_fc_list([call])}"
