# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Annotated, Optional, cast

import click
import typer

from fcsynth.llm.factory import BackendFactory
from fcsynth.model.miss_label import MissLabel
from fcsynth.model.pipeline import BackendKind
from fcsynth.repository.configuration import CONFIGURATION_REPO
from fcsynth.repository.fsp import load_fsps, save_fsps
from fcsynth.repository.graph_set import load_graph_set, save_graph_set
from fcsynth.repository.instance import load_instances, save_instances
from fcsynth.repository.jsonl import read_jsonl, write_json, write_jsonl
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
from fcsynth.service.pipeline import count_reasons, student_references
from fcsynth.service.postprocess import compute_stats, postprocess
from fcsynth.service.trajectory_distiller import (
    distill_all,
    get_distill_config_template,
    pair_dataset_record,
)
from fcsynth.service.translation import translate_all
from fcsynth.terminal.errors import exit_on_error
from fcsynth.view.view.views import dataset as dataset_report
from fcsynth.view.view.views import stage as stage_report

BACKEND_CHOICE = click.Choice(["mock", "llm"])

_MISS_LABELS = {"params": MissLabel.MISS_PARAMS, "func": MissLabel.MISS_FUNC}

SeedOption = Annotated[int, typer.Option("--seed", "-s", help="seed for every random draw")]


def _factory() -> BackendFactory:
    return BackendFactory(CONFIGURATION_REPO.get_config())


def _executor(seed: int, error_rate: float) -> SimulatedExecutor:
    # translate and distill must agree on these to replay identical outputs
    return SimulatedExecutor(derive_seed(seed, "execute"), error_rate)


def build_graph(
    pool_path: Annotated[Path, typer.Option("--pool", "-p", help="function pool, JSON or JSONL")],
    out: Annotated[Path, typer.Option("--out", "-o", help="graph set JSON")],
    seed: SeedOption = 0,
    judge: Annotated[
        str, typer.Option("--judge", click_type=BACKEND_CHOICE, help="dependency judge backend")
    ] = "mock",
    k_cand: Annotated[int, typer.Option("--k-cand", "-k", min=1, help="candidates per target")] = 30,
    cross_category: Annotated[
        bool, typer.Option("--cross-category", help="sample candidates from the whole pool")
    ] = False,
    classify: Annotated[
        bool, typer.Option("--classify", help="relabel category and tool class first")
    ] = False,
    pool_out: Annotated[
        Optional[Path], typer.Option("--pool-out", help="write the relabelled pool here")
    ] = None,
) -> None:
    """
    Build one local dependency graph per function in the pool.
    """
    with exit_on_error():
        factory = _factory()
        kind = cast(BackendKind, judge)
        pool = load_pool(pool_path)
        if classify:
            pool = classify_pool(pool, factory.taxonomy_judge(kind, pool))
        graphs = build_graph_set(
            pool,
            factory.dependency_judge(kind),
            k_cand,
            derive_rng(seed, "graph"),
            cross_category,
        )
        save_graph_set(out, graphs)
        if pool_out is not None:
            save_pool(pool_out, pool)

    stage_report.graph_report(graphs, out)


def sample_fsp(
    graphs_path: Annotated[Path, typer.Option("--graphs", "-g", help="graph set JSON")],
    out: Annotated[Path, typer.Option("--out", "-o", help="FSP JSONL")],
    steps: Annotated[int, typer.Option("--steps", min=1, help="walk length in edges")] = 7,
    count: Annotated[int, typer.Option("--count", "-n", min=1, help="FSPs to keep")] = 100,
    seed: SeedOption = 0,
    min_turns: Annotated[
        int, typer.Option("--min-turns", min=1, help="discard shorter walks")
    ] = 2,
    forbid_backtrack: Annotated[
        bool, typer.Option("--forbid-backtrack", help="never step straight back")
    ] = False,
) -> None:
    """
    Sample function signature paths by random walks over the graphs.
    """
    with exit_on_error():
        fsps = sample_fsps(
            load_graph_set(graphs_path),
            count,
            steps,
            derive_seed(seed, "walk"),
            min_turns,
            forbid_backtrack,
        )
        written = save_fsps(out, fsps)

    stage_report.stage_summary_report("sample-fsp", out, written)


def enhance(
    in_path: Annotated[Path, typer.Option("--in", "-i", help="FSP JSONL")],
    graphs_path: Annotated[Path, typer.Option("--graphs", "-g", help="graph set JSON")],
    pool_path: Annotated[Path, typer.Option("--pool", "-p", help="function pool")],
    out: Annotated[Path, typer.Option("--out", "-o", help="enhanced FSP JSONL")],
    merge_p: Annotated[
        float, typer.Option("--merge-p", min=0.0, max=1.0, help="merge probability")
    ] = 0.3,
    q_long: Annotated[
        float, typer.Option("--q-long", min=0.0, max=1.0, help="nested insert probability")
    ] = 0.5,
    seed: SeedOption = 0,
    judge: Annotated[
        str, typer.Option("--judge", click_type=BACKEND_CHOICE, help="nested-call judge")
    ] = "mock",
    miss_label: Annotated[
        Optional[str],
        typer.Option(
            "--miss-label",
            click_type=click.Choice(sorted(_MISS_LABELS)),
            help="force the split label (default: drawn per FSP)",
        ),
    ] = None,
) -> None:
    """
    Apply merge, insert and split; every input FSP yields a complete and a miss variant.
    """
    with exit_on_error():
        pool = load_pool(pool_path)
        enhanced = enhance_all(
            load_fsps(in_path),
            load_graph_set(graphs_path),
            _factory().nested_judge(cast(BackendKind, judge), pool),
            {
                "merge_p": merge_p,
                "q_long": q_long,
                "miss_label": None if miss_label is None else _MISS_LABELS[miss_label],
            },
            derive_seed(seed, "enhance"),
        )
        written = save_fsps(out, enhanced)

    stage_report.stage_summary_report("enhance", out, written)


def translate(
    in_path: Annotated[Path, typer.Option("--in", "-i", help="enhanced FSP JSONL")],
    pool_path: Annotated[Path, typer.Option("--pool", "-p", help="function pool")],
    out: Annotated[Path, typer.Option("--out", "-o", help="translated instance JSONL")],
    backend: Annotated[
        str, typer.Option("--backend", "-b", click_type=BACKEND_CHOICE, help="translator")
    ] = "mock",
    seed: SeedOption = 0,
    min_turns: Annotated[int, typer.Option("--min-turns", min=1)] = 2,
    retries: Annotated[int, typer.Option("--retries", min=0, help="per forth translation")] = 2,
    error_rate: Annotated[
        float,
        typer.Option("--error-rate", min=0.0, max=1.0, help="share of failing simulated calls"),
    ] = 0.0,
    dropped_out: Annotated[
        Optional[Path], typer.Option("--dropped-out", help="JSONL of dropped FSPs")
    ] = None,
) -> None:
    """
    Turn FSPs into multi-turn queries and reference calls with simulated execution.
    """
    with exit_on_error():
        kept, dropped = translate_all(
            load_fsps(in_path),
            load_pool(pool_path),
            _factory().translator(cast(BackendKind, backend)),
            _executor(seed, error_rate),
            translation_seed=derive_seed(seed, "translate"),
            min_turns=min_turns,
            retries=retries,
        )
        written = save_instances(out, kept)
        if dropped_out is not None:
            write_jsonl(
                dropped_out,
                ({"id": e.instance_id, "stage": "translate", "reason": e.reason} for e in dropped),
            )

    stage_report.stage_summary_report(
        "translate", out, written, count_reasons(e.reason for e in dropped)
    )


def distill(
    in_path: Annotated[Path, typer.Option("--in", "-i", help="translated instance JSONL")],
    pool_path: Annotated[Path, typer.Option("--pool", "-p", help="function pool")],
    out: Annotated[Path, typer.Option("--out", "-o", help="positive trajectory JSONL")],
    pairs_out: Annotated[
        Optional[Path], typer.Option("--pairs-out", help="preference pair JSONL")
    ] = None,
    teacher: Annotated[str, typer.Option("--teacher", click_type=BACKEND_CHOICE)] = "mock",
    student: Annotated[str, typer.Option("--student", click_type=BACKEND_CHOICE)] = "mock",
    judge: Annotated[str, typer.Option("--judge", click_type=BACKEND_CHOICE)] = "mock",
    negatives: Annotated[
        bool, typer.Option("--negatives/--no-negatives", help="mine negative trajectories")
    ] = True,
    rollouts: Annotated[int, typer.Option("--rollouts", min=1, help="student samples per turn")] = 10,
    selection: Annotated[
        str, typer.Option("--selection", click_type=click.Choice(["first", "random"]))
    ] = "first",
    seed: SeedOption = 0,
    one_at_a_time: Annotated[
        bool, typer.Option("--one-at-a-time", help="one call per assistant step")
    ] = False,
    max_steps: Annotated[int, typer.Option("--max-steps", min=1, help="steps per turn")] = 8,
    retries: Annotated[int, typer.Option("--retries", min=0)] = 2,
    error_rate: Annotated[
        float,
        typer.Option("--error-rate", min=0.0, max=1.0, help="must match the translate run"),
    ] = 0.0,
    student_error_rate: Annotated[
        float, typer.Option("--student-error-rate", min=0.0, max=1.0, help="mock student only")
    ] = 0.3,
) -> None:
    """
    Roll out hinted teacher trajectories and, with --negatives, preference pairs.
    """
    with exit_on_error():
        factory = _factory()
        config = CONFIGURATION_REPO.get_config()
        instances = load_instances(in_path)
        cfg = get_distill_config_template()
        cfg["max_steps"] = max_steps
        cfg["one_at_a_time"] = one_at_a_time
        cfg["retries"] = retries
        cfg["rollouts"] = rollouts
        cfg["rollout_temperature"] = config["rollout_temperature"]
        cfg["selection"] = "random" if selection == "random" else "first"

        student_backend = judge_backend = None
        if negatives:
            student_backend = factory.student(
                cast(BackendKind, student),
                student_references(instances),
                student_error_rate,
                one_at_a_time,
            )
            judge_backend = factory.judge(cast(BackendKind, judge))
        positives, pairs, dropped = distill_all(
            instances,
            load_pool(pool_path),
            factory.teacher(cast(BackendKind, teacher), one_at_a_time),
            _executor(seed, error_rate),
            cfg,
            derive_seed(seed, "distill"),
            student_backend,
            judge_backend,
        )
        written = save_trajectories(out, positives)
        if pairs_out is not None:
            save_pairs(pairs_out, pairs)

    stage_report.stage_summary_report(
        "distill", out, written, count_reasons(d["reason"] for d in dropped)
    )
    if pairs_out is not None:
        stage_report.stage_summary_report("preference pairs", pairs_out, len(pairs))


def mix(
    in_path: Annotated[
        Optional[Path], typer.Option("--in", "-i", help="positive trajectory JSONL")
    ] = None,
    pool_path: Annotated[
        Optional[Path], typer.Option("--pool", "-p", help="pool for irrelevance samples")
    ] = None,
    pairs_path: Annotated[
        Optional[Path], typer.Option("--pairs", help="preference pair JSONL")
    ] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="dataset JSONL")] = None,
    n_single: Annotated[
        Optional[int], typer.Option("--single", min=0, help="single-turn samples")
    ] = None,
    n_multi: Annotated[
        Optional[int], typer.Option("--multi", min=0, help="multi-turn samples")
    ] = None,
    n_irrelevance: Annotated[
        Optional[int], typer.Option("--irrelevance", min=0, help="irrelevance samples")
    ] = None,
    seed: SeedOption = 0,
    keywords: Annotated[
        Optional[list[str]],
        typer.Option("--keyword", "-k", help="failure keyword; accepts multiple"),
    ] = None,
    no_shuffle: Annotated[
        bool, typer.Option("--no-shuffle", help="keep function order in system prompts")
    ] = False,
    irrelevance_tools: Annotated[
        int, typer.Option("--irrelevance-tools", min=1, help="tools per irrelevance sample")
    ] = 3,
) -> None:
    """
    Filter, shuffle and mix the trajectories into the final dataset.

    Without --in only the mixture plan and its irrelevance ratio are reported.
    """
    if in_path is None:
        if n_single is None or n_multi is None or n_irrelevance is None:
            raise typer.BadParameter(
                "a plan without --in needs --single, --multi and --irrelevance"
            )
        with exit_on_error():
            dataset_report.mixture_plan_report(
                {
                    "n_single_turn": n_single,
                    "n_multi_turn": n_multi,
                    "n_irrelevance": n_irrelevance,
                    "seed": seed,
                }
            )
        return
    if out is None or pool_path is None:
        raise typer.BadParameter("mixing needs --pool and --out")

    with exit_on_error():
        result = postprocess(
            load_trajectories(in_path),
            load_pairs(pairs_path) if pairs_path is not None else [],
            load_pool(pool_path),
            {"n_single_turn": n_single, "n_multi_turn": n_multi, "n_irrelevance": n_irrelevance},
            derive_seed(seed, "mix"),
            derive_rng(seed, "postprocess"),
            list(keywords) if keywords else None,
            not no_shuffle,
            irrelevance_tools,
        )
        mixed = result["mixed"]
        written = write_jsonl(out, mixed["records"])
        write_json(out.with_name(f"{out.stem}.manifest.json"), mixed["manifest"])
        preference_out = out.with_name(f"{out.stem}.preference.jsonl")
        if pairs_path is not None:
            write_jsonl(preference_out, (pair_dataset_record(pair) for pair in result["pairs"]))

    dataset_report.mixture_plan_report(mixed["manifest"]["config"])
    reasons = count_reasons(str(d["keyword"]) for d in result["filtered"].values())
    stage_report.stage_summary_report("mix", out, written, reasons)
    if pairs_path is not None:
        stage_report.stage_summary_report("preference", preference_out, len(result["pairs"]))


def stats(
    in_paths: Annotated[
        list[Path], typer.Option("--in", "-i", help="dataset JSONL; accepts multiple")
    ],
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="stats JSON")] = None,
) -> None:
    """
    Count instances per type, subtype, turn count and call count.
    """
    with exit_on_error():
        records = [record for path in in_paths for record in read_jsonl(path)]
        result = compute_stats(records)
        if out is not None:
            write_json(out, result)

    dataset_report.stats_report(result)
