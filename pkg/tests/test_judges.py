import json

from fcsynth.llm.judges import LlmTranslationBackend, format_history
from fcsynth.llm.mock import ScriptedBackend

EXCLUDED = "[Do not use these APIs]:\n"


def _turn(index, *names):
    return {
        "index": index,
        "query": f"query {index}",
        "miss_label": None,
        "targets": list(names),
        "withheld": [],
        "added_functions": [],
        "reference_calls": [{"name": name, "args": {}} for name in names],
        "outputs": [],
    }


def _excluded(backend):
    prompt = backend.calls[0][-1]["content"]
    return json.loads(prompt.split(EXCLUDED, 1)[1])


def test_revisited_function_is_not_excluded(pool):
    backend = ScriptedBackend(["Find the weather again."])
    history = [_turn(0, "get_location_id"), _turn(1, "get_current_weather")]
    translator = LlmTranslationBackend(backend)
    query = translator.back_translate(
        history, [pool.by_id("get_location_id")], {}, None, [], None
    )
    assert query == "Find the weather again."
    assert _excluded(backend) == ["get_current_weather"]


def test_earlier_functions_are_excluded(pool):
    backend = ScriptedBackend(["Now the forecast."])
    history = [_turn(0, "get_location_id"), _turn(1, "get_current_weather")]
    LlmTranslationBackend(backend).back_translate(
        history, [pool.by_id("get_forecast")], {}, None, [], None
    )
    assert _excluded(backend) == ["get_current_weather", "get_location_id"]


def test_history_marks_the_last_round():
    text = format_history([_turn(0, "get_location_id"), _turn(1, "get_forecast")])
    assert "Round 1:" in text
    assert "[Last Round] Round 2:" in text
    assert "Function calls: [get_forecast()]" in text
