import pytest

from fcsynth.llm.mock import (
    MISS_FUNCTION_TEXT,
    HeuristicJudgeBackend,
    HintEchoBackend,
    MappingTaxonomyJudge,
    RuleNestedJudge,
    ScriptedBackend,
    perturb_calls,
)
from fcsynth.llm.prompts import parse_yes_no_line, render
from fcsynth.model.category import MISC_CATEGORY
from fcsynth.model.prompt_id import PromptId


def _judge(model, reference):
    messages = render(
        PromptId.NEGATIVE_JUDGE,
        {"conversation": "user: hi", "model_response": model, "reference_response": reference},
    )
    return HeuristicJudgeBackend().complete(messages, {})


@pytest.mark.parametrize(
    ("model", "reference", "expected"),
    [
        ('[f(a=1, b="x")]', '[f(b="x", a=1)]', "yes"),
        ("[f(a=1)]", "[f(a=1), g(b=2)]", "no\n1"),
        ("[f(a=2)]", "[f(a=1)]", "no\n2"),
        ("Sure, done.", "[f(a=1)]", "no\n5"),
        ("It is sunny.", "It rains.", "no\n4"),
    ],
)
def test_heuristic_judge(model, reference, expected):
    assert _judge(model, reference) == expected


def test_hint_echo_calls_then_summarises():
    backend = HintEchoBackend(one_at_a_time=True)
    user = {"role": "user", "content": "Do both\n[Hint]: f(a=1), g(b=2)"}
    assert backend.complete([user], {}) == "[f(a=1)]"
    tail = [
        {"role": "assistant", "content": "[f(a=1)]"},
        {"role": "tool", "content": '{"name": "f", "output": {}}'},
    ]
    assert backend.complete([user, *tail], {}) == "[g(b=2)]"
    tail += [
        {"role": "assistant", "content": "[g(b=2)]"},
        {"role": "tool", "content": '{"name": "g", "output": {}}'},
    ]
    assert backend.complete([user, *tail], {}) == "I have finished the request using f, g."


def test_hint_echo_handles_miss_hints():
    user = {"role": "user", "content": "Do it\n[Hint]: miss function"}
    assert HintEchoBackend().complete([user], {}) == MISS_FUNCTION_TEXT


def test_perturbation_changes_the_calls():
    calls = [{"name": "f", "args": {"a": 1}}, {"name": "g", "args": {"b": "x"}}]
    assert perturb_calls(calls, 0.1) == calls[:1]
    assert perturb_calls(calls, 0.9)[0]["args"] == {"a": 2}
    assert perturb_calls([{"name": "f", "args": {"on": True}}], 0.9)[0]["args"] == {"on": False}


def test_rule_nested_judge(pool):
    judge = RuleNestedJudge(pool)
    assert parse_yes_no_line(judge.judge("get_menu", "order_dish"))[0]
    assert not parse_yes_no_line(judge.judge("order_dish", "get_menu"))[0]


def test_mapping_taxonomy_defaults_to_misc(pool):
    judge = MappingTaxonomyJudge({"get_menu": ("Food", "Restaurant tool")})
    assert judge.classify(pool.by_id("get_menu")) == "Food\nRestaurant tool"
    assert judge.classify(pool.by_id("book_flight")).splitlines()[0] == MISC_CATEGORY


def test_scripted_backend_runs_out():
    backend = ScriptedBackend(["one"])
    assert backend.complete([], {}) == "one"
    with pytest.raises(RuntimeError):
        backend.complete([], {})
