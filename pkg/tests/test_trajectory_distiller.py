import pytest

from fcsynth.llm.mock import (
    MISS_PARAMS_TEXT,
    HeuristicJudgeBackend,
    HintEchoBackend,
    ReferenceStudentBackend,
    TemplateTranslationBackend,
)
from fcsynth.llm.prompts import JudgmentError, ProtocolError
from fcsynth.model.hint import HintKind
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.trajectory import ErrorType, Polarity
from fcsynth.service.executor import SimulatedExecutor
from fcsynth.service.pipeline import student_references
from fcsynth.service.trajectory_distiller import (
    HINT_TAG,
    NegativeSamplingError,
    PairingError,
    build_pair,
    contains_hint,
    distill_all,
    distill_instance,
    get_distill_config_template,
    inject_hints,
    pair_dataset_record,
    parse_judgement,
    sample_negative,
    sample_positive,
    strip_hints,
    to_dataset_record,
    to_messages,
)
from fcsynth.service.translation import translate_fsp
from fcsynth.template.fsp import get_fsp_template, get_turn_group_template


class HintLeakingBackend:
    def complete(self, messages, params):
        return "[Hint]: I was told to call get_location_id"


@pytest.fixture
def instance(pool):
    fsp = get_fsp_template("fsp-000001", "get_location_id", 0)
    fsp["turns"] = [
        get_turn_group_template(["get_location_id"]),
        get_turn_group_template(miss_label=MissLabel.MISS_PARAMS),
        get_turn_group_template(["get_current_weather"]),
    ]
    return translate_fsp(fsp, pool, TemplateTranslationBackend(), SimulatedExecutor(3))


@pytest.fixture
def executor():
    return SimulatedExecutor(3)


def _student(instance, error_rate):
    return ReferenceStudentBackend(student_references([instance]), error_rate=error_rate)


def test_hints_follow_the_turn_kind(instance, pool):
    hinted = inject_hints(instance, pool)
    kinds = [turn["hint"]["kind"] for turn in hinted["turns"]]
    assert kinds == [HintKind.CORRECT, HintKind.MISS_PARAMS, HintKind.CORRECT]
    assert hinted["turns"][0]["hint"]["content"].startswith("get_location_id(")


def test_positive_follows_the_reference_calls(instance, pool, executor):
    positive = sample_positive(HintEchoBackend(), inject_hints(instance, pool), executor)
    first, miss, last = positive["turns"]
    assert first["steps"][0]["tool_outputs"] == instance["turns"][0]["outputs"]
    assert len(first["steps"]) == 2
    assert first["steps"][1]["tool_outputs"] == []
    assert [step["action"] for step in miss["steps"]] == [MISS_PARAMS_TEXT]
    assert last["steps"][0]["tool_outputs"][0]["call"] == instance["turns"][2]["reference_calls"][0]
    assert positive["polarity"] == Polarity.POSITIVE
    assert contains_hint(positive)


def test_stripped_trajectories_carry_no_hint(instance, pool, executor):
    positive = sample_positive(HintEchoBackend(), inject_hints(instance, pool), executor)
    stripped = strip_hints(positive)
    assert not contains_hint(stripped)
    assert all(turn["hint"] is None for turn in stripped["turns"])
    assert positive["turns"][0]["hint"] is not None

    record = to_dataset_record(positive)
    assert all(HINT_TAG not in message["content"] for message in record["messages"])
    assert len(record["action_spans"]) == 3
    for span in record["action_spans"]:
        assert all(record["messages"][i]["role"] == "assistant" for i in span)


def test_to_messages_puts_tool_outputs_after_actions(instance, pool, executor):
    positive = strip_hints(sample_positive(HintEchoBackend(), inject_hints(instance, pool), executor))
    messages, spans = to_messages(positive)
    assert messages[0]["role"] == "system"
    assert messages[1] == {"role": "user", "content": instance["turns"][0]["query"]}
    assert messages[2]["role"] == "assistant"
    assert messages[3]["role"] == "tool"
    assert spans[0] == [2, 4]


def test_correct_student_yields_no_pair(instance, pool, executor):
    result = distill_instance(
        instance,
        pool,
        HintEchoBackend(),
        executor,
        get_distill_config_template(),
        student=_student(instance, 0.0),
        judge=HeuristicJudgeBackend(),
    )
    assert result["positive"] is not None
    assert result["pair"] is None
    assert result["dropped"] is None


def test_wrong_student_yields_a_pair(instance, pool, executor):
    cfg = get_distill_config_template()
    cfg["rollouts"] = 2
    result = distill_instance(
        instance,
        pool,
        HintEchoBackend(),
        executor,
        cfg,
        student=_student(instance, 1.0),
        judge=HeuristicJudgeBackend(),
    )
    pair = result["pair"]
    assert pair is not None
    assert pair["id"] == instance["id"]
    assert pair["rejected"]["polarity"] == Polarity.NEGATIVE
    assert pair["rejected"]["provenance"]["misleading_turn"] == 0
    assert pair["rejected"]["provenance"]["error_type"] == ErrorType.SHORT_DEPENDENCY.value
    assert not contains_hint(pair["chosen"]) and not contains_hint(pair["rejected"])
    assert [t["query"] for t in pair["chosen"]["turns"]] == [
        t["query"] for t in pair["rejected"]["turns"]
    ]

    record = pair_dataset_record(pair)
    assert record["data_type"] == "preference"
    assert record["chosen"]["id"] == record["rejected"]["id"]


def test_negative_needs_a_mined_hint(instance, pool, executor):
    with pytest.raises(NegativeSamplingError):
        sample_negative(_student(instance, 1.0), instance, {}, executor, pool)


def test_identical_pair_members_are_rejected(instance, pool, executor):
    positive = strip_hints(sample_positive(HintEchoBackend(), inject_hints(instance, pool), executor))
    with pytest.raises(PairingError):
        build_pair(positive, positive)


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("yes", {"correct": True, "error_type": None}),
        ("Yes.\nmatches", {"correct": True, "error_type": None}),
        ("no\n3", {"correct": False, "error_type": ErrorType.LONG_DEPENDENCY}),
        ("no\n5. missed a parameter", {"correct": False, "error_type": ErrorType.MISSED_FUNCTION_OR_PARAMS}),
    ],
)
def test_parse_judgement(text, expected):
    assert parse_judgement(text) == expected


def test_judgements_outside_the_protocol_fail():
    with pytest.raises(JudgmentError):
        parse_judgement("no\nit looks wrong")
    with pytest.raises(ProtocolError):
        parse_judgement("maybe")


def test_leaking_teacher_drops_the_instance(instance, pool, executor):
    positives, pairs, dropped = distill_all(
        [instance], pool, HintLeakingBackend(), executor, get_distill_config_template(), seed=0
    )
    assert positives == [] and pairs == []
    assert dropped[0]["id"] == instance["id"]
    assert dropped[0]["stage"] == "distill"
