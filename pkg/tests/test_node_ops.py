import math
import random
import statistics
from collections import Counter

import pytest

from fcsynth.errors import BackendError, InputValidationError
from fcsynth.llm.mock import RuleNestedJudge
from fcsynth.model.miss_label import MissLabel
from fcsynth.service.node_ops import (
    enhance,
    enhance_all,
    function_sequence,
    get_enhance_config_template,
    op_insert,
    op_merge,
    op_split,
)
from fcsynth.template.fsp import get_fsp_template, get_turn_group_template


def _chain(*names, fsp_id="fsp-000000"):
    fsp = get_fsp_template(fsp_id, names[0], 0)
    fsp["turns"] = [get_turn_group_template([name]) for name in names]
    return fsp


def _expected_turns(n, p):
    expected = [0.0, 1.0]
    for length in range(2, n + 1):
        expected.append(p * (1 + expected[length - 2]) + (1 - p) * (1 + expected[length - 1]))
    return expected[n]


class DownJudge:
    def judge(self, first, second):
        raise BackendError("judge unreachable")


def test_merge_with_zero_probability_is_identity():
    fsp = _chain("a", "b", "c", "d")
    merged = op_merge(fsp, 0.0, random.Random(0))
    assert merged["turns"] == fsp["turns"]
    assert merged["provenance"]["ops"] == ["merge"]
    assert fsp["provenance"]["ops"] == []


def test_merge_with_certainty_halves_even_chains():
    merged = op_merge(_chain("a", "b", "c", "d", "e", "f"), 1.0, random.Random(0))
    assert [turn["functions"] for turn in merged["turns"]] == [["a", "b"], ["c", "d"], ["e", "f"]]


def test_merge_never_drops_or_reorders_functions():
    fsp = _chain("a", "b", "c", "d", "e", "f", "g")
    for seed in range(50):
        assert function_sequence(op_merge(fsp, 0.5, random.Random(seed))) == list("abcdefg")


def test_merge_turn_count_matches_its_expectation():
    trials = 20_000
    fsp = _chain("a", "b", "c", "d", "e", "f", "g")
    rng = random.Random(7)
    lengths = [len(op_merge(fsp, 0.3, rng)["turns"]) for _ in range(trials)]
    sigma = statistics.pstdev(lengths) / math.sqrt(trials)
    assert abs(statistics.fmean(lengths) - _expected_turns(7, 0.3)) < 3 * sigma


def test_merge_rejects_bad_probability():
    with pytest.raises(ValueError):
        op_merge(_chain("a", "b"), 1.5, random.Random(0))


def test_insert_keeps_order_and_adds_at_most_one_per_turn(pool, graphs):
    fsp = _chain("get_location_id", "search_flights", "find_restaurants")
    judge = RuleNestedJudge(pool)
    for seed in range(30):
        out = op_insert(fsp, graphs, judge, 0.5, random.Random(seed))
        sequence = function_sequence(out)
        originals = [name for name in sequence if name in function_sequence(fsp)]
        assert originals == function_sequence(fsp)
        assert len(fsp["turns"]) <= len(out["turns"]) <= 2 * len(fsp["turns"])
        assert len(sequence) <= 2 * len(fsp["turns"])
        assert out["provenance"]["ops"] == ["insert"]


def test_insert_adds_a_nested_neighbour(pool, graphs):
    fsp = _chain("book_flight")
    out = op_insert(fsp, graphs, RuleNestedJudge(pool), 0.0, random.Random(0))
    assert [turn["functions"] for turn in out["turns"]] == [["book_flight", "cancel_booking"]]

    out = op_insert(fsp, graphs, RuleNestedJudge(pool), 1.0, random.Random(0))
    assert [turn["functions"] for turn in out["turns"]] == [["book_flight"], ["cancel_booking"]]


def test_insert_skips_sinks_and_unavailable_judges(pool, graphs):
    fsp = _chain("track_order")
    assert op_insert(fsp, graphs, RuleNestedJudge(pool), 0.5, random.Random(0))["turns"] == fsp["turns"]

    fsp = _chain("book_flight")
    assert op_insert(fsp, graphs, DownJudge(), 0.5, random.Random(0))["turns"] == fsp["turns"]


def test_split_adds_exactly_one_empty_turn():
    fsp = _chain("a", "b", "c")
    out = op_split(fsp, random.Random(3))
    labelled = [turn for turn in out["turns"] if turn["miss_label"] is not None]
    assert len(labelled) == 1
    assert labelled[0]["functions"] == []
    assert len(out["turns"]) == 4
    assert out["turns"][0]["miss_label"] is None
    assert function_sequence(out) == ["a", "b", "c"]


def test_split_position_and_label_are_uniform():
    trials = 10_000
    fsp = _chain("a", "b", "c", "d")
    rng = random.Random(99)
    positions = Counter()
    labels = Counter()
    for _ in range(trials):
        turns = op_split(fsp, rng)["turns"]
        (index,) = [i for i, turn in enumerate(turns) if turn["miss_label"] is not None]
        positions[index] += 1
        labels[turns[index]["miss_label"]] += 1

    assert set(positions) == {1, 2, 3, 4}
    sigma = math.sqrt(0.25 * 0.75 / trials)
    for count in positions.values():
        assert abs(count / trials - 0.25) < 3 * sigma
    sigma = math.sqrt(0.25 / trials)
    for count in labels.values():
        assert abs(count / trials - 0.5) < 3 * sigma


def test_split_label_can_be_forced():
    out = op_split(_chain("a", "b"), random.Random(0), MissLabel.MISS_FUNC)
    assert [turn["miss_label"] for turn in out["turns"] if turn["miss_label"]] == [MissLabel.MISS_FUNC]


def test_split_runs_once():
    out = op_split(_chain("a", "b"), random.Random(0))
    with pytest.raises(InputValidationError):
        op_split(out, random.Random(0))
    with pytest.raises(InputValidationError):
        op_merge(out, 0.3, random.Random(0))


def test_enhance_returns_the_pair(pool, graphs):
    fsp = _chain("find_restaurants", "get_menu", fsp_id="fsp-000004")
    phi, phi_hat = enhance(
        fsp, graphs, RuleNestedJudge(pool), get_enhance_config_template(), random.Random(1)
    )
    assert phi["id"] == "fsp-000004"
    assert phi_hat["id"] == "fsp-000004:miss"
    assert phi["provenance"]["ops"] == ["merge", "insert"]
    assert phi_hat["provenance"]["ops"] == ["merge", "insert", "split"]
    assert function_sequence(phi_hat) == function_sequence(phi)
    assert len(phi_hat["turns"]) == len(phi["turns"]) + 1


def test_enhance_all_is_seeded_and_interleaved(pool, graphs):
    fsps = [_chain("search_flights", "book_flight", fsp_id=f"fsp-{i:06d}") for i in range(4)]
    cfg = get_enhance_config_template()
    first = enhance_all(fsps, graphs, RuleNestedJudge(pool), cfg, seed=5)
    assert first == enhance_all(fsps, graphs, RuleNestedJudge(pool), cfg, seed=5, jobs=3)
    assert [fsp["id"] for fsp in first[:2]] == ["fsp-000000", "fsp-000000:miss"]
    assert len(first) == 8
