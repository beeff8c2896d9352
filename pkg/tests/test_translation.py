import pytest

from fcsynth.errors import BackendError, InputValidationError
from fcsynth.llm.mock import TemplateTranslationBackend
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.translation import FINISH
from fcsynth.service.executor import SimulatedExecutor
from fcsynth.service.translation import (
    back_translate,
    check_forth_calls,
    parse_forth_answer,
    translate_all,
    translate_fsp,
    withheld_params,
)
from fcsynth.template.fsp import get_fsp_template, get_turn_group_template


def _fsp(*groups, fsp_id="fsp-000000"):
    fsp = get_fsp_template(fsp_id, "start", 4)
    fsp["turns"] = [
        get_turn_group_template(miss_label=group)
        if isinstance(group, MissLabel)
        else get_turn_group_template(group)
        for group in groups
    ]
    return fsp


class FinishingBackend(TemplateTranslationBackend):
    def forth_translate(self, query, function, t_prev, history):
        if function["api_name"] == "get_current_weather":
            return "Thought:\nnothing left to do\nAnswer:\nFINISH"
        return super().forth_translate(query, function, t_prev, history)


class WrongCallBackend(TemplateTranslationBackend):
    def __init__(self):
        super().__init__()
        self.attempts = 0

    def forth_translate(self, query, function, t_prev, history):
        self.attempts += 1
        return 'Answer:\n[some_other_function(city="Paris")]'


class SilentBackend(TemplateTranslationBackend):
    def back_translate(self, *args):
        return "   "


def test_outputs_flow_into_the_next_turn(pool):
    backend = TemplateTranslationBackend()
    instance = translate_fsp(
        _fsp(["get_location_id"], ["get_current_weather"]), pool, backend, SimulatedExecutor(1)
    )
    first, second = instance["turns"]
    location = first["outputs"][0]["payload"]["location_id"]
    assert second["reference_calls"] == [
        {"name": "get_current_weather", "args": {"location_id": location}}
    ]
    assert backend.seen_t_prev[1] == ("get_current_weather", first["outputs"])
    assert instance["functions"] == ["get_location_id", "get_current_weather"]
    assert instance["source_fsp_seed"] == 4


def test_miss_params_turn_withholds_a_required_parameter(pool):
    instance = translate_fsp(
        _fsp(["get_location_id"], MissLabel.MISS_PARAMS, ["get_current_weather"]),
        pool,
        TemplateTranslationBackend(),
        SimulatedExecutor(1),
    )
    miss, resumed = instance["turns"][1:]
    assert miss["miss_label"] == MissLabel.MISS_PARAMS
    assert miss["withheld"] == ["location_id"]
    assert miss["reference_calls"] == [] and miss["outputs"] == []
    assert resumed["withheld"] == ["location_id"]
    assert "location id" in resumed["query"]


def test_queries_spell_out_the_values_the_context_cannot_supply(pool):
    backend = TemplateTranslationBackend()
    sig = pool.by_id("search_flights")
    query = backend.back_translate([], [sig], {}, None, [], None)
    assert 'origin="sample origin"' in query
    assert 'destination="sample destination"' in query
    assert parse_forth_answer(backend.forth_translate(query, sig, [], [])) == [
        {
            "name": "search_flights",
            "args": {
                "origin": "sample origin",
                "destination": "sample destination",
                "date": "sample date",
            },
        }
    ]


def test_answers_echo_the_values_named_in_the_query(pool):
    backend = TemplateTranslationBackend()
    query = 'Please search flights with origin="CDG", destination="JFK", date="2024-05-01"'
    [call] = parse_forth_answer(
        backend.forth_translate(query, pool.by_id("search_flights"), [], [])
    )
    assert call["args"] == {"origin": "CDG", "destination": "JFK", "date": "2024-05-01"}


def test_withheld_value_is_left_out_then_supplied(pool):
    instance = translate_fsp(
        _fsp(["search_flights"], MissLabel.MISS_PARAMS, ["book_flight"]),
        pool,
        TemplateTranslationBackend(),
        SimulatedExecutor(1),
    )
    first, miss, resumed = instance["turns"]
    assert miss["withheld"] == ["passenger_name"]
    assert "passenger_name" not in miss["query"]
    assert 'passenger_name="sample passenger name"' in resumed["query"]
    flight = first["outputs"][0]["payload"]["flight_id"]
    assert flight not in resumed["query"]
    assert resumed["reference_calls"] == [
        {
            "name": "book_flight",
            "args": {"flight_id": flight, "passenger_name": "sample passenger name"},
        }
    ]


def test_miss_function_turn_announces_the_function_later(pool):
    instance = translate_fsp(
        _fsp(["get_location_id"], MissLabel.MISS_FUNC, ["get_forecast"]),
        pool,
        TemplateTranslationBackend(),
        SimulatedExecutor(1),
    )
    assert instance["functions"] == ["get_location_id"]
    miss, resumed = instance["turns"][1:]
    assert miss["withheld"] == ["get_forecast"]
    assert resumed["added_functions"] == ["get_forecast"]


def test_miss_function_on_an_offered_function_asks_for_params(pool):
    instance = translate_fsp(
        _fsp(["get_location_id"], ["get_forecast"], MissLabel.MISS_FUNC),
        pool,
        TemplateTranslationBackend(),
        SimulatedExecutor(1),
    )
    miss = instance["turns"][2]
    assert miss["miss_label"] == MissLabel.MISS_PARAMS
    assert miss["targets"] == ["get_forecast"]
    assert miss["withheld"] == ["days"]


def test_finish_truncates_and_short_instances_drop(pool):
    fsp = _fsp(["get_location_id"], ["get_air_quality"], ["get_current_weather"])
    instance = translate_fsp(fsp, pool, FinishingBackend(), SimulatedExecutor(1))
    assert [turn["targets"] for turn in instance["turns"]] == [
        ["get_location_id"],
        ["get_air_quality"],
    ]

    kept, dropped = translate_all(
        [_fsp(["get_location_id"], ["get_current_weather"], fsp_id="fsp-000009")],
        pool,
        FinishingBackend(),
        SimulatedExecutor(1),
    )
    assert kept == []
    assert [e.instance_id for e in dropped] == ["fsp-000009"]


def test_rejected_answers_are_retried_then_dropped(pool):
    backend = WrongCallBackend()
    kept, dropped = translate_all(
        [_fsp(["get_location_id"], ["get_current_weather"])],
        pool,
        backend,
        SimulatedExecutor(1),
        retries=2,
    )
    assert kept == []
    assert len(dropped) == 1
    assert backend.attempts == 3


def test_empty_queries_fail_back_translation(pool):
    with pytest.raises(BackendError):
        back_translate(SilentBackend(), [], [pool.by_id("get_menu")], {}, retries=1)
    with pytest.raises(InputValidationError):
        back_translate(TemplateTranslationBackend(), [], [], {})


def test_parse_forth_answer():
    assert parse_forth_answer("Thought:\nlook it up\nAnswer:\n[f(a=1)]") == [
        {"name": "f", "args": {"a": 1}}
    ]
    assert parse_forth_answer("Thought:\nnothing\nAnswer: FINISH") == FINISH
    assert parse_forth_answer("f(a=2)") == [{"name": "f", "args": {"a": 2}}]


def test_check_forth_calls_caps_parallel_calls(pool):
    sig = pool.by_id("get_location_id")
    call = {"name": "get_location_id", "args": {"city": "Paris"}}
    check_forth_calls([call, call, call], sig)
    with pytest.raises(InputValidationError):
        check_forth_calls([call] * 4, sig)
    with pytest.raises(InputValidationError):
        check_forth_calls([{"name": "get_location_id", "args": {}}], sig)


def test_withheld_params_prefers_the_last_required(pool):
    assert withheld_params(pool.by_id("get_forecast")) == ["days"]
    assert withheld_params(pool.by_id("get_menu")) == ["restaurant_id"]


def test_translation_is_deterministic(pool):
    fsps = [
        _fsp(["find_restaurants"], ["get_menu"], ["order_dish"], fsp_id=f"fsp-{i:06d}")
        for i in range(3)
    ]
    first = translate_all(fsps, pool, TemplateTranslationBackend(), SimulatedExecutor(5))[0]
    second = translate_all(fsps, pool, TemplateTranslationBackend(), SimulatedExecutor(5), jobs=2)[0]
    assert first == second
    assert len(first) == 3
