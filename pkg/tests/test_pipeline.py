import json
from pathlib import Path

import pytest

from fcsynth.configuration import get_default_configuration
from fcsynth.errors import InputValidationError
from fcsynth.repository.jsonl import read_json, read_jsonl
from fcsynth.repository.pipeline_config import load_pipeline_document
from fcsynth.service.pipeline import (
    DATASET_FILE,
    MANIFEST_FILE,
    POSITIVES_FILE,
    PREFERENCE_FILE,
    STAGES,
    STATS_FILE,
    merge_config,
    read_run_report,
    run_pipeline,
)

GOLDEN = Path(__file__).parent / "fixtures" / "golden_dataset.jsonl"


@pytest.fixture
def document(pool_path):
    return {
        "pool_path": str(pool_path),
        "seed": 7,
        "walk": {"count": 12},
        "distill": {"rollouts": 2, "student_error_rate": 0.5},
    }


def _statuses(report):
    return {stage["name"]: stage["status"] for stage in report["stages"]}


def test_full_run_produces_a_hint_free_dataset(document, tmp_path):
    work = tmp_path / "run"
    report = run_pipeline(document, get_default_configuration(), work_dir=str(work))
    assert [stage["name"] for stage in report["stages"]] == list(STAGES)
    assert set(_statuses(report).values()) == {"ran"}
    assert read_run_report(work) == report

    for name in (DATASET_FILE, PREFERENCE_FILE):
        assert "[Hint]" not in (work / name).read_text(encoding="utf-8")

    records = read_jsonl(work / DATASET_FILE)
    manifest = read_json(work / MANIFEST_FILE)
    stats = read_json(work / STATS_FILE)
    assert stats["total"] == len(records) + len(read_jsonl(work / PREFERENCE_FILE))
    for data_type, ids in manifest["selected"].items():
        assert len(set(ids)) == len(ids)
        if ids:
            assert stats["counts"][data_type] == len(ids)


def test_runs_are_deterministic(document, tmp_path):
    run_pipeline(document, get_default_configuration(), work_dir=str(tmp_path / "a"))
    run_pipeline(document, get_default_configuration(), work_dir=str(tmp_path / "b"), jobs=3)
    for name in (DATASET_FILE, PREFERENCE_FILE, MANIFEST_FILE):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_other_seed_changes_the_dataset(document, tmp_path):
    run_pipeline(document, get_default_configuration(), work_dir=str(tmp_path / "a"))
    run_pipeline(document, get_default_configuration(), seed=8, work_dir=str(tmp_path / "b"))
    assert (tmp_path / "a" / DATASET_FILE).read_bytes() != (tmp_path / "b" / DATASET_FILE).read_bytes()


def test_resume_reruns_from_the_missing_output(document, tmp_path):
    work = tmp_path / "run"
    config = get_default_configuration()
    run_pipeline(document, config, work_dir=str(work))
    dataset = (work / DATASET_FILE).read_bytes()

    assert set(_statuses(run_pipeline(document, config, work_dir=str(work))).values()) == {"cached"}

    (work / POSITIVES_FILE).unlink()
    statuses = _statuses(run_pipeline(document, config, work_dir=str(work)))
    assert [statuses[name] for name in STAGES] == [
        "cached",
        "cached",
        "cached",
        "cached",
        "ran",
        "ran",
        "ran",
    ]
    assert (work / DATASET_FILE).read_bytes() == dataset


def test_config_change_reruns_downstream_stages(document, tmp_path):
    work = tmp_path / "run"
    run_pipeline(document, get_default_configuration(), work_dir=str(work))
    document["postprocess"] = {"shuffle": False}
    statuses = _statuses(run_pipeline(document, get_default_configuration(), work_dir=str(work)))
    assert statuses["distill"] == "cached"
    assert statuses["postprocess"] == "ran"
    assert statuses["stats"] == "ran"


def test_golden_dataset(document, tmp_path, update_golden):
    run_pipeline(document, get_default_configuration(), work_dir=str(tmp_path / "run"))
    produced = (tmp_path / "run" / DATASET_FILE).read_text(encoding="utf-8")
    if update_golden:
        GOLDEN.write_text(produced, encoding="utf-8")
        pytest.skip("golden dataset written")
    if not GOLDEN.is_file():
        pytest.fail(f"{GOLDEN.name} is missing; create it with pytest --update-golden")
    assert produced == GOLDEN.read_text(encoding="utf-8")


def test_missing_pool_is_rejected(tmp_path):
    with pytest.raises(InputValidationError, match="pool file not found"):
        run_pipeline(
            {"pool_path": str(tmp_path / "absent.json")},
            get_default_configuration(),
            work_dir=str(tmp_path / "run"),
        )


@pytest.mark.parametrize(
    "document",
    [
        {"colour": "blue"},
        {"walk": 3},
        {"walk": {"stride": 2}},
        {"node_ops": {"miss_label": "miss_everything"}},
    ],
)
def test_bad_config_documents(document):
    with pytest.raises(InputValidationError):
        merge_config(document)


def test_config_sections_overlay_the_defaults():
    cfg = merge_config({"walk": {"count": 5}, "node_ops": {"miss_label": "miss func"}})
    assert cfg["walk"] == {"steps": 7, "count": 5, "min_turns": 2, "forbid_backtrack": False}
    assert cfg["node_ops"]["miss_label"] == "miss func"
    assert cfg["graph"]["k_cand"] == 30


def test_pipeline_document_loading(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("seed: 3\nwalk:\n  count: 4\n")
    assert load_pipeline_document(path) == {"seed": 3, "walk": {"count": 4}}
    path.write_text("- just\n- a list\n")
    with pytest.raises(InputValidationError):
        load_pipeline_document(path)
    with pytest.raises(InputValidationError):
        load_pipeline_document(tmp_path / "absent.yaml")
    assert json.loads(json.dumps(merge_config({})))["seed"] == 0
