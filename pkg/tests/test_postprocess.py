import random

import pytest

from fcsynth.errors import InputValidationError
from fcsynth.fclang import serialize_fc_list
from fcsynth.model.data_type import DataType
from fcsynth.model.trajectory import Polarity
from fcsynth.service.postprocess import (
    build_irrelevance,
    build_single_turn,
    compute_stats,
    filter_trajectories,
    irrelevance_ratio,
    keyword_filter,
    mix,
    postprocess,
    shuffle_pair,
)
from fcsynth.service.trajectory_distiller import HINT_TAG, to_dataset_record
from fcsynth.template.mixture import get_mixture_config_template
from fcsynth.template.trajectory import get_trajectory_template, get_turn_template

WEATHER = ["get_location_id", "get_current_weather", "get_air_quality"]


def _traj(pool, traj_id, calls_per_turn=(1, 1), error_turn=None, names=WEATHER):
    traj = get_trajectory_template(traj_id, [pool.by_id(name) for name in names])
    for number, count in enumerate(calls_per_turn, start=1):
        turn = get_turn_template(f"query {number} of {traj_id}")
        calls = [{"name": names[0], "args": {"city": f"city {i}"}} for i in range(count)]
        payload = {"location_id": "loc-1"}
        if number == error_turn:
            payload = {"error": "Bad request: the server could not process the supplied arguments"}
        turn["steps"].append(
            {
                "action": serialize_fc_list(calls),
                "tool_outputs": [
                    {"call": call, "payload": payload, "is_error": number == error_turn}
                    for call in calls
                ],
            }
        )
        turn["steps"].append({"action": "Done.", "tool_outputs": []})
        traj["turns"].append(turn)
    return traj


def _cfg(single, multi, irrelevance, seed=0):
    return {"n_single_turn": single, "n_multi_turn": multi, "n_irrelevance": irrelevance, "seed": seed}


@pytest.mark.parametrize(
    ("irrelevance", "expected"),
    [
        (2_000, 6.7),
        (3_000, 9.7),
        (4_000, 12.5),
        (5_000, 15.2),
        (6_000, 17.6),
        (7_000, 20.0),
        (10_000, 26.3),
    ],
)
def test_irrelevance_ratios(irrelevance, expected):
    assert round(irrelevance_ratio(_cfg(20_000, 8_000, irrelevance)), 1) == expected


def test_empty_mixture_has_no_ratio():
    with pytest.raises(InputValidationError):
        irrelevance_ratio(_cfg(0, 0, 0))


def test_default_mixture_keeps_irrelevance_in_band():
    assert 15.0 <= irrelevance_ratio(get_mixture_config_template()) <= 17.0


def test_totals_count_pairs_once():
    sft = {"data_type": "multi_turn", "messages": [], "action_spans": [[]]}
    pair = {"id": "p", "data_type": "preference", "chosen": sft, "rejected": sft}
    stats = compute_stats([sft] * 34_000 + [pair] * 4_556)
    assert stats["total"] == 38_556
    assert stats["counts"] == {"multi_turn": 34_000, "preference": 4_556}


def test_filter_catches_every_planted_keyword(pool):
    rng = random.Random(12)
    planted = set(rng.sample(range(200), 50))
    trajectories = [
        _traj(pool, f"t{i}", error_turn=2 if i in planted else None) for i in range(200)
    ]
    kept, dropped = filter_trajectories(trajectories)
    assert set(dropped) == {f"t{i}" for i in planted}
    assert len(kept) == 150
    assert all(decision["turn"] == 2 for decision in dropped.values())
    assert all(decision["keyword"] == "Bad request" for decision in dropped.values())


def test_custom_keywords(pool):
    traj = _traj(pool, "t0")
    assert keyword_filter(traj, ["loc-1"]) == {"keep": False, "keyword": "loc-1", "turn": 1}
    assert keyword_filter(traj)["keep"]
    with pytest.raises(InputValidationError):
        keyword_filter(traj, [])


@pytest.mark.parametrize(
    ("calls", "subtype"),
    [((1, 1), "single"), ((2, 1), "parallel")],
)
def test_single_turn_samples(pool, calls, subtype):
    single = build_single_turn(_traj(pool, "t0", calls_per_turn=calls))
    assert single["data_type"] == DataType.SINGLE_TURN
    assert single["subtype"] == subtype
    assert len(single["turns"]) == 1
    assert single["provenance"]["source"] == "t0"


def test_irrelevance_offers_only_unrelated_tools(pool):
    sample = build_irrelevance(_traj(pool, "t0"), pool, 3, random.Random(0))
    assert sample["data_type"] == DataType.IRRELEVANCE
    assert len(sample["system_functions"]) == 3
    assert all(pool.group_of(sig["id"])[0] != "Weather" for sig in sample["system_functions"])
    (turn,) = sample["turns"]
    assert turn["query"] == "query 1 of t0"
    assert turn["steps"][0]["tool_outputs"] == []


def test_mix_is_seeded_and_checks_availability(pool):
    datasets = {
        DataType.SINGLE_TURN: [build_single_turn(_traj(pool, f"s{i}")) for i in range(4)],
        DataType.MULTI_TURN: [_traj(pool, f"m{i}") for i in range(4)],
        DataType.IRRELEVANCE: [],
    }
    first = mix(datasets, _cfg(2, 3, 0, seed=4))
    assert first == mix(datasets, _cfg(2, 3, 0, seed=4))
    assert len(first["records"]) == 5
    assert len(first["manifest"]["selected"]["multi_turn"]) == 3
    assert first["manifest"]["selected"]["irrelevance"] == []

    with pytest.raises(InputValidationError, match="insufficient"):
        mix(datasets, _cfg(2, 3, 1))
    with pytest.raises(InputValidationError):
        mix(datasets, _cfg(0, 0, 0))


def test_shuffled_pairs_keep_the_same_tool_order(pool):
    chosen = _traj(pool, "p0")
    rejected = _traj(pool, "p0", calls_per_turn=(2, 1))
    rejected["polarity"] = Polarity.NEGATIVE
    for seed in range(10):
        pair = shuffle_pair({"id": "p0", "chosen": chosen, "rejected": rejected}, random.Random(seed))
        assert [s["id"] for s in pair["chosen"]["system_functions"]] == [
            s["id"] for s in pair["rejected"]["system_functions"]
        ]


def test_postprocess_end_to_end(pool):
    positives = [_traj(pool, f"t{i}", error_turn=1 if i == 0 else None) for i in range(6)]
    result = postprocess(
        positives,
        [],
        pool,
        {"n_single_turn": None, "n_multi_turn": 3, "n_irrelevance": 2},
        seed=8,
        rng=random.Random(8),
    )
    assert list(result["filtered"]) == ["t0"]
    selected = result["mixed"]["manifest"]["selected"]
    assert len(selected["single_turn"]) == 5
    assert len(selected["multi_turn"]) == 3
    assert len(selected["irrelevance"]) == 2
    records = result["mixed"]["records"]
    assert len(records) == 10
    assert all(HINT_TAG not in m["content"] for r in records for m in r["messages"])

    stats = compute_stats(records)
    assert stats["total"] == 10
    assert stats["subtypes"] == {"single": 5}


def test_stats_histograms(pool):
    record = to_dataset_record(_traj(pool, "t0", calls_per_turn=(2, 1)))
    stats = compute_stats([record])
    assert stats["turns"] == {2: 1}
    assert stats["fcs"] == {3: 1}
    with pytest.raises(InputValidationError):
        compute_stats([])
