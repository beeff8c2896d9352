# SPDX-License-Identifier: MIT

"""Stage-by-stage orchestration with content-hash checkpoints under the work directory."""

from copy import deepcopy
from pathlib import Path
from typing import Any, Callable, Literal, Optional, cast

from fcsynth import time
from fcsynth.configuration import Configuration
from fcsynth.errors import InputValidationError
from fcsynth.llm.factory import BackendFactory
from fcsynth.llm.mock import reference_key
from fcsynth.logger import get_logger
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.pipeline import PipelineConfig, RunReport, StageReport
from fcsynth.model.translation import TranslatedInstance
from fcsynth.repository.checkpoint import CheckpointRepository, hash_data
from fcsynth.repository.fsp import load_fsps, save_fsps
from fcsynth.repository.graph_set import load_graph_set, save_graph_set
from fcsynth.repository.instance import load_instances, save_instances
from fcsynth.repository.jsonl import read_json, read_jsonl, write_json, write_jsonl
from fcsynth.repository.pool import load_pool, save_pool
from fcsynth.repository.trajectory import (
    load_pairs,
    load_trajectories,
    save_pairs,
    save_trajectories,
)
from fcsynth.service.concurrency import derive_rng, derive_seed
from fcsynth.service.dependency_graph import build_graph_set
from fcsynth.service.executor import SimulatedExecutor
from fcsynth.service.fsp_sampler import sample_fsps
from fcsynth.service.function_pool import classify_pool
from fcsynth.service.node_ops import enhance_all
from fcsynth.service.postprocess import compute_stats, postprocess
from fcsynth.service.trajectory_distiller import (
    DistillConfig,
    distill_all,
    pair_dataset_record,
    reference_action,
)
from fcsynth.service.translation import translate_all
from fcsynth.template.pipeline import get_pipeline_config_template

logger = get_logger(__name__)

STAGES = ("graph", "fsp", "enhance", "translate", "distill", "postprocess", "stats")

POOL_FILE = "pool.json"
GRAPHS_FILE = "graphs.json"
FSP_FILE = "fsps.jsonl"
ENHANCED_FILE = "enhanced.jsonl"
INSTANCES_FILE = "instances.jsonl"
TRANSLATE_DROPS_FILE = "translate_dropped.jsonl"
POSITIVES_FILE = "positives.jsonl"
PAIRS_FILE = "pairs.jsonl"
DISTILL_DROPS_FILE = "distill_dropped.jsonl"
DATASET_FILE = "dataset.jsonl"
PREFERENCE_FILE = "preference.jsonl"
MANIFEST_FILE = "manifest.json"
FILTER_FILE = "filtered.json"
STATS_FILE = "stats.json"
REPORT_FILE = "run_report.json"

# name, action, config section, input files, output files
Stage = tuple[str, Callable[[], tuple[int, dict[str, int]]], Any, list[Path], list[Path]]


def merge_config(document: dict[str, Any]) -> PipelineConfig:
    """Overlay a config document on the defaults, one section deep."""
    merged = cast(dict[str, Any], get_pipeline_config_template())
    for key, value in document.items():
        if key not in merged:
            raise InputValidationError(f"unknown pipeline config key: {key}")
        if isinstance(merged[key], dict):
            if not isinstance(value, dict):
                raise InputValidationError(f"pipeline config section {key} must be a mapping")
            unknown = set(value) - set(merged[key])
            if unknown:
                raise InputValidationError(
                    f"unknown keys in section {key}: {', '.join(sorted(unknown))}"
                )
            merged[key].update(value)
        else:
            merged[key] = value
    if merged["node_ops"]["miss_label"] is not None:
        try:
            merged["node_ops"]["miss_label"] = MissLabel(merged["node_ops"]["miss_label"])
        except ValueError as e:
            raise InputValidationError(f"unknown miss label: {e}") from e
    return cast(PipelineConfig, merged)


def validate_config(cfg: PipelineConfig) -> None:
    if not cfg["pool_path"]:
        raise InputValidationError("pipeline config has no pool_path")
    if not Path(cfg["pool_path"]).is_file():
        raise InputValidationError(f"pool file not found: {cfg['pool_path']}")
    if not cfg["work_dir"]:
        raise InputValidationError("pipeline config has no work_dir")
    if cfg["walk"]["steps"] < 1 or cfg["walk"]["count"] < 1:
        raise InputValidationError("walk steps and count must be at least 1")
    if cfg["graph"]["k_cand"] < 1:
        raise InputValidationError("graph k_cand must be at least 1")
    if not 0.0 <= cfg["node_ops"]["merge_p"] <= 1.0 or not 0.0 <= cfg["node_ops"]["q_long"] <= 1.0:
        raise InputValidationError("merge_p and q_long must lie in [0, 1]")
    if cfg["distill"]["rollouts"] < 1:
        raise InputValidationError("distill rollouts must be at least 1")
    if not cfg["postprocess"]["keywords"]:
        raise InputValidationError("postprocess keywords must not be empty")
    for backend in (
        cfg["graph"]["judge"],
        cfg["node_ops"]["judge"],
        cfg["translation"]["backend"],
        cfg["distill"]["teacher"],
        cfg["distill"]["student"],
        cfg["distill"]["judge"],
    ):
        if backend not in ("mock", "llm"):
            raise InputValidationError(f"unknown backend kind {backend!r}")


def distill_config(cfg: PipelineConfig, configuration: Configuration) -> DistillConfig:
    return {
        "max_steps": cfg["distill"]["max_steps"],
        "one_at_a_time": cfg["distill"]["one_at_a_time"],
        "retries": cfg["translation"]["retries"],
        "rollouts": cfg["distill"]["rollouts"],
        "rollout_temperature": configuration["rollout_temperature"],
        "selection": cfg["distill"]["selection"],
    }


def student_references(instances: list[TranslatedInstance]) -> dict[str, str]:
    """Reference action for every normal turn, keyed by the queries up to it."""
    references: dict[str, str] = {}
    for instance in instances:
        queries: list[str] = []
        for turn in instance["turns"]:
            queries.append(turn["query"])
            if turn["miss_label"] is None:
                references[reference_key(queries)] = reference_action(turn)
    return references


class PipelineRunner:
    def __init__(
        self,
        cfg: PipelineConfig,
        configuration: Configuration,
        factory: Optional[BackendFactory] = None,
    ) -> None:
        validate_config(cfg)
        self.cfg = cfg
        self.configuration = configuration
        self.factory = factory or BackendFactory(configuration)
        self.work_dir = Path(cfg["work_dir"])
        self.checkpoints = CheckpointRepository(self.work_dir)
        self.seed = cfg["seed"]
        self.jobs = cfg["jobs"]

    def path(self, name: str) -> Path:
        return self.work_dir / name

    def _executor(self) -> SimulatedExecutor:
        return SimulatedExecutor(
            derive_seed(self.seed, "execute"), self.cfg["translation"]["error_rate"]
        )

    def stage_graph(self) -> tuple[int, dict[str, int]]:
        pool = load_pool(Path(self.cfg["pool_path"]))
        if self.cfg["graph"]["classify"]:
            pool = classify_pool(
                pool, self.factory.taxonomy_judge(self.cfg["graph"]["judge"], pool), jobs=self.jobs
            )
        graphs = build_graph_set(
            pool,
            self.factory.dependency_judge(self.cfg["graph"]["judge"]),
            self.cfg["graph"]["k_cand"],
            derive_rng(self.seed, "graph"),
            self.cfg["graph"]["cross_category"],
            jobs=self.jobs,
        )
        save_pool(self.path(POOL_FILE), pool)
        save_graph_set(self.path(GRAPHS_FILE), graphs)
        flagged = sum(1 for graph in graphs.values() if graph["flagged"])
        return (len(graphs), {"flagged": flagged} if flagged else {})

    def stage_fsp(self) -> tuple[int, dict[str, int]]:
        walk = self.cfg["walk"]
        fsps = sample_fsps(
            load_graph_set(self.path(GRAPHS_FILE)),
            walk["count"],
            walk["steps"],
            derive_seed(self.seed, "walk"),
            walk["min_turns"],
            walk["forbid_backtrack"],
        )
        return (save_fsps(self.path(FSP_FILE), fsps), {})

    def stage_enhance(self) -> tuple[int, dict[str, int]]:
        pool = load_pool(self.path(POOL_FILE))
        ops = self.cfg["node_ops"]
        enhanced = enhance_all(
            load_fsps(self.path(FSP_FILE)),
            load_graph_set(self.path(GRAPHS_FILE)),
            self.factory.nested_judge(ops["judge"], pool),
            {"merge_p": ops["merge_p"], "q_long": ops["q_long"], "miss_label": ops["miss_label"]},
            derive_seed(self.seed, "enhance"),
            self.jobs,
        )
        return (save_fsps(self.path(ENHANCED_FILE), enhanced), {})

    def stage_translate(self) -> tuple[int, dict[str, int]]:
        cfg = self.cfg["translation"]
        kept, dropped = translate_all(
            load_fsps(self.path(ENHANCED_FILE)),
            load_pool(self.path(POOL_FILE)),
            self.factory.translator(cfg["backend"]),
            self._executor(),
            translation_seed=derive_seed(self.seed, "translate"),
            min_turns=cfg["min_turns"],
            retries=cfg["retries"],
            jobs=self.jobs,
        )
        save_instances(self.path(INSTANCES_FILE), kept)
        write_jsonl(
            self.path(TRANSLATE_DROPS_FILE),
            ({"id": e.instance_id, "stage": "translate", "reason": e.reason} for e in dropped),
        )
        return (len(kept), count_reasons(e.reason for e in dropped))

    def stage_distill(self) -> tuple[int, dict[str, int]]:
        cfg = self.cfg["distill"]
        instances = load_instances(self.path(INSTANCES_FILE))
        student = judge = None
        if cfg["negatives"]:
            student = self.factory.student(
                cfg["student"],
                student_references(instances),
                cfg["student_error_rate"],
                cfg["one_at_a_time"],
            )
            judge = self.factory.judge(cfg["judge"])
        positives, pairs, dropped = distill_all(
            instances,
            load_pool(self.path(POOL_FILE)),
            self.factory.teacher(cfg["teacher"], cfg["one_at_a_time"]),
            self._executor(),
            distill_config(self.cfg, self.configuration),
            derive_seed(self.seed, "distill"),
            student,
            judge,
            self.jobs,
        )
        save_trajectories(self.path(POSITIVES_FILE), positives)
        save_pairs(self.path(PAIRS_FILE), pairs)
        write_jsonl(self.path(DISTILL_DROPS_FILE), dropped)
        return (len(positives), count_reasons(d["reason"] for d in dropped))

    def stage_postprocess(self) -> tuple[int, dict[str, int]]:
        post = self.cfg["postprocess"]
        result = postprocess(
            load_trajectories(self.path(POSITIVES_FILE)),
            load_pairs(self.path(PAIRS_FILE)),
            load_pool(self.path(POOL_FILE)),
            dict(self.cfg["mixture"]),
            derive_seed(self.seed, "mix"),
            derive_rng(self.seed, "postprocess"),
            post["keywords"],
            post["shuffle"],
            post["irrelevance_tools"],
        )
        mixed = result["mixed"]
        write_jsonl(self.path(DATASET_FILE), mixed["records"])
        write_jsonl(
            self.path(PREFERENCE_FILE), (pair_dataset_record(pair) for pair in result["pairs"])
        )
        write_json(self.path(MANIFEST_FILE), mixed["manifest"])
        write_json(self.path(FILTER_FILE), result["filtered"])
        reasons = count_reasons(str(d["keyword"]) for d in result["filtered"].values())
        return (len(mixed["records"]) + len(result["pairs"]), reasons)

    def stage_stats(self) -> tuple[int, dict[str, int]]:
        records = read_jsonl(self.path(DATASET_FILE)) + read_jsonl(self.path(PREFERENCE_FILE))
        stats = compute_stats(records)
        write_json(self.path(STATS_FILE), stats)
        return (stats["total"], {})

    def stage_plan(self) -> list[Stage]:
        pool_path = Path(self.cfg["pool_path"])
        return [
            (
                "graph",
                self.stage_graph,
                self.cfg["graph"],
                [pool_path],
                [self.path(POOL_FILE), self.path(GRAPHS_FILE)],
            ),
            ("fsp", self.stage_fsp, self.cfg["walk"], [self.path(GRAPHS_FILE)], [self.path(FSP_FILE)]),
            (
                "enhance",
                self.stage_enhance,
                self.cfg["node_ops"],
                [self.path(FSP_FILE), self.path(GRAPHS_FILE), self.path(POOL_FILE)],
                [self.path(ENHANCED_FILE)],
            ),
            (
                "translate",
                self.stage_translate,
                self.cfg["translation"],
                [self.path(ENHANCED_FILE), self.path(POOL_FILE)],
                [self.path(INSTANCES_FILE), self.path(TRANSLATE_DROPS_FILE)],
            ),
            (
                "distill",
                self.stage_distill,
                {**self.cfg["distill"], "translation": self.cfg["translation"]},
                [self.path(INSTANCES_FILE), self.path(POOL_FILE)],
                [self.path(POSITIVES_FILE), self.path(PAIRS_FILE), self.path(DISTILL_DROPS_FILE)],
            ),
            (
                "postprocess",
                self.stage_postprocess,
                {"postprocess": self.cfg["postprocess"], "mixture": self.cfg["mixture"]},
                [self.path(POSITIVES_FILE), self.path(PAIRS_FILE), self.path(POOL_FILE)],
                [
                    self.path(DATASET_FILE),
                    self.path(PREFERENCE_FILE),
                    self.path(MANIFEST_FILE),
                    self.path(FILTER_FILE),
                ],
            ),
            (
                "stats",
                self.stage_stats,
                {},
                [self.path(DATASET_FILE), self.path(PREFERENCE_FILE)],
                [self.path(STATS_FILE)],
            ),
        ]

    def run(self) -> RunReport:
        started = time.now_utc()
        self.work_dir.mkdir(parents=True, exist_ok=True)
        reports: list[StageReport] = []
        upstream_ran = False
        try:
            for name, action, section, inputs, outputs in self.stage_plan():
                config_hash = hash_data({"seed": self.seed, "section": section})
                stage_start = time.now_utc()
                if not upstream_ran and self.checkpoints.is_current(name, config_hash, inputs):
                    logger.info("stage %s is up to date", name)
                    reports.append(_report(name, "cached", 0, {}, 0.0))
                    continue
                upstream_ran = True
                self.checkpoints.invalidate(name)
                count, reasons = action()
                self.checkpoints.record(name, config_hash, inputs, outputs)
                self.checkpoints.flush()
                seconds = time.elapsed_seconds(stage_start, time.now_utc())
                logger.info("stage %s: %d items in %.2fs", name, count, seconds)
                reports.append(_report(name, "ran", count, reasons, seconds))
        finally:
            self.checkpoints.flush()

        finished = time.now_utc()
        report: RunReport = {
            "started": time.datetime_to_iso_str(started),
            "finished": time.datetime_to_iso_str(finished),
            "seconds": time.elapsed_seconds(started, finished),
            "seed": self.seed,
            "stages": reports,
        }
        write_json(self.path(REPORT_FILE), report)
        return report


def count_reasons(reasons: Any) -> dict[str, int]:
    counts: dict[str, int] = {}
    for reason in reasons:
        key = str(reason).split(":")[0]
        counts[key] = counts.get(key, 0) + 1
    return counts


def _report(
    name: str,
    status: Literal["ran", "cached"],
    count: int,
    reasons: dict[str, int],
    seconds: float,
) -> StageReport:
    return {
        "name": name,
        "status": status,
        "count": count,
        "dropped": sum(reasons.values()),
        "drop_reasons": reasons,
        "seconds": seconds,
    }


def run_pipeline(
    document: dict[str, Any],
    configuration: Configuration,
    seed: Optional[int] = None,
    work_dir: Optional[str] = None,
    jobs: Optional[int] = None,
    factory: Optional[BackendFactory] = None,
) -> RunReport:
    cfg = merge_config(deepcopy(document))
    if seed is not None:
        cfg["seed"] = seed
    if work_dir is not None:
        cfg["work_dir"] = work_dir
    if jobs is not None:
        cfg["jobs"] = jobs
    return PipelineRunner(cfg, configuration, factory).run()


def read_run_report(work_dir: Path) -> RunReport:
    return cast(RunReport, read_json(work_dir / REPORT_FILE))
