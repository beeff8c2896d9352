import json

import pytest

from fcsynth.errors import BackendError, InputValidationError
from fcsynth.llm.judges import LlmTaxonomyJudge
from fcsynth.llm.mock import MappingTaxonomyJudge, ScriptedBackend
from fcsynth.model.category import CATEGORY_LABELS, DEFAULT_TOOL_CLASS, MISC_CATEGORY
from fcsynth.repository.pool import load_pool, save_pool
from fcsynth.service.function_pool import (
    ClassificationError,
    PoolValidationError,
    UnknownFunctionError,
    build_pool,
    classify_function,
    classify_pool,
    parse_classification,
    parse_signature,
    prompt_view,
    require_function,
    response_fields,
)


def _record(**overrides):
    record = {
        "api_name": "get_weather",
        "parameters": {
            "type": "dict",
            "properties": {"city": {"type": "string", "description": "City"}},
            "required": ["city"],
            "optional": [],
        },
        "response_info": "temperature (number)",
    }
    record.update(overrides)
    return record


class RaisingClassifier:
    def classify(self, sig):
        raise BackendError("down")


def test_toy_pool_loads_with_groups(pool):
    assert len(pool) == 12
    assert sorted(pool.groups()) == [
        ("Food", "Restaurant tool"),
        ("Travel", "Flight booking tool"),
        ("Weather", "Weather condition tool"),
    ]
    assert len(pool.group_members("Travel", "Flight booking tool")) == 4


def test_type_aliases_are_normalised(pool):
    assert pool.by_id("get_forecast")["parameters"]["properties"]["days"]["type"] == "integer"


def test_id_defaults_to_api_name():
    sig = parse_signature(_record())
    assert sig["id"] == "get_weather"
    assert sig["category"] == MISC_CATEGORY


def test_required_must_be_declared():
    record = _record()
    record["parameters"]["required"] = ["country"]
    with pytest.raises(PoolValidationError, match="country"):
        parse_signature(record)


def test_params_must_be_required_or_optional():
    record = _record()
    record["parameters"]["properties"]["units"] = {"type": "string", "description": ""}
    with pytest.raises(PoolValidationError, match="units"):
        parse_signature(record)


def test_unsupported_type_is_rejected():
    record = _record()
    record["parameters"]["properties"]["city"]["type"] = "geo"
    with pytest.raises(PoolValidationError):
        parse_signature(record)


def test_duplicate_api_names_are_rejected():
    with pytest.raises(PoolValidationError, match="duplicate"):
        build_pool([_record(), _record(id="other")])


def test_empty_pool_is_rejected(tmp_path):
    path = tmp_path / "pool.json"
    path.write_text("[]")
    with pytest.raises(InputValidationError, match="empty"):
        load_pool(path)


def test_jsonl_pool_and_round_trip(tmp_path, pool):
    jsonl = tmp_path / "pool.jsonl"
    jsonl.write_text("\n".join(json.dumps(sig) for sig in pool) + "\n")
    assert load_pool(jsonl).functions == pool.functions

    saved = tmp_path / "saved.json"
    save_pool(saved, pool)
    assert load_pool(saved).functions == pool.functions


def test_response_fields(pool):
    assert response_fields(pool.by_id("order_dish")) == [
        ("order_id", "string"),
        ("eta_minutes", "integer"),
    ]


def test_prompt_view_hides_internal_fields(pool):
    view = prompt_view(pool.by_id("get_menu"))
    assert "id" not in view and "tool_class" not in view
    assert view["api_name"] == "get_menu"


def test_unknown_function(pool):
    with pytest.raises(UnknownFunctionError):
        require_function(pool, "teleport")


def test_category_list_keeps_the_duplicate():
    assert len(CATEGORY_LABELS) == 49
    assert len(set(CATEGORY_LABELS)) == 48


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("Weather\nForecast tool", ("Weather", "Forecast tool")),
        ("'Travel'", ("Travel", DEFAULT_TOOL_CLASS)),
        ("Astrology", (MISC_CATEGORY, DEFAULT_TOOL_CLASS)),
    ],
)
def test_parse_classification(text, expected):
    assert parse_classification(text, parse_signature(_record())) == expected


def test_empty_classification_is_an_error():
    with pytest.raises(ClassificationError):
        parse_classification("  \n ", parse_signature(_record()))


def test_failed_classification_falls_back_to_misc(pool):
    relabelled = classify_pool(pool, RaisingClassifier(), retries=1)
    assert {sig["category"] for sig in relabelled} == {MISC_CATEGORY}
    assert len(relabelled) == len(pool)


def test_classify_function_uses_the_judge_labels():
    sig = parse_signature(_record())
    judge = MappingTaxonomyJudge({"get_weather": ("Weather", "Forecast tool")})
    assert classify_function(sig, judge) == ("Weather", "Forecast tool")


def test_classify_function_gives_up_after_retries():
    with pytest.raises(ClassificationError, match="after 3 attempts"):
        classify_function(parse_signature(_record()), RaisingClassifier(), retries=2)


def test_llm_taxonomy_judge_renders_the_signature():
    backend = ScriptedBackend(["Weather\nForecast tool"])
    sig = parse_signature(_record())
    assert classify_function(sig, LlmTaxonomyJudge(backend)) == ("Weather", "Forecast tool")
    prompt = "\n".join(message["content"] for message in backend.calls[0])
    assert "get_weather" in prompt
    assert "city" in prompt
