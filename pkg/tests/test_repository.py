import json

import pytest

from fcsynth.errors import InputValidationError
from fcsynth.model.miss_label import MissLabel
from fcsynth.repository.fsp import fsp_from_record, load_fsps, save_fsps
from fcsynth.repository.graph_set import load_graph_set, save_graph_set
from fcsynth.template.fsp import get_fsp_template, get_turn_group_template


def _record(turns, miss_at=None, label=None):
    return {"id": "fsp-000001", "turns": turns, "miss_label_at": miss_at, "label": label, "seed": 3}


def test_split_fsp_survives_a_save(tmp_path):
    fsp = get_fsp_template("fsp-000001", "get_location_id", 3)
    fsp["turns"] = [
        get_turn_group_template(["get_location_id"]),
        get_turn_group_template(miss_label=MissLabel.MISS_FUNC),
        get_turn_group_template(["get_forecast"]),
    ]
    path = tmp_path / "fsps.jsonl"
    save_fsps(path, [fsp])
    [loaded] = load_fsps(path)
    assert loaded["turns"] == fsp["turns"]


@pytest.mark.parametrize(
    "record",
    [
        _record([["a"], []]),
        _record([["a"], ["b"]], miss_at=1, label="miss params"),
        _record([["a"], ["b"]], miss_at=3, label="miss params"),
        _record([["a"], []], miss_at=1, label="miss everything"),
    ],
)
def test_miss_label_marks_exactly_the_empty_turn(record):
    with pytest.raises(InputValidationError, match="FSP record 4"):
        fsp_from_record(record, line=4)


@pytest.mark.parametrize("edges", [[["a"]], [["a", "b", "c"]], ["ab"], "a->b"])
def test_malformed_edges_name_the_graph(tmp_path, edges):
    path = tmp_path / "graphs.json"
    path.write_text(json.dumps({"get_menu": {"neighbors": ["b"], "edges": edges}}))
    with pytest.raises(InputValidationError, match="get_menu"):
        load_graph_set(path)


def test_graph_set_reloads(tmp_path, graphs):
    path = tmp_path / "graphs.json"
    save_graph_set(path, graphs)
    assert load_graph_set(path) == graphs
