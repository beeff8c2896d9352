# SPDX-License-Identifier: MIT

from typing import Literal, Optional, TypedDict

from fcsynth.model.miss_label import MissLabel

BackendKind = Literal["mock", "llm"]


class GraphStageConfig(TypedDict):
    k_cand: int
    cross_category: bool
    judge: BackendKind
    classify: bool


class WalkStageConfig(TypedDict):
    steps: int
    count: int
    min_turns: int
    forbid_backtrack: bool


class NodeOpsStageConfig(TypedDict):
    merge_p: float
    q_long: float
    miss_label: Optional[MissLabel]
    judge: BackendKind


class TranslationStageConfig(TypedDict):
    backend: BackendKind
    retries: int
    min_turns: int
    error_rate: float


class DistillStageConfig(TypedDict):
    teacher: BackendKind
    student: BackendKind
    judge: BackendKind
    negatives: bool
    rollouts: int
    selection: Literal["first", "random"]
    one_at_a_time: bool
    max_steps: int
    student_error_rate: float


class PostprocessStageConfig(TypedDict):
    keywords: list[str]
    shuffle: bool
    irrelevance_tools: int


class MixtureStageConfig(TypedDict):
    n_single_turn: Optional[int]  # None takes everything available
    n_multi_turn: Optional[int]
    n_irrelevance: Optional[int]


class PipelineConfig(TypedDict):
    pool_path: str
    work_dir: str
    seed: int
    jobs: Optional[int]
    graph: GraphStageConfig
    walk: WalkStageConfig
    node_ops: NodeOpsStageConfig
    translation: TranslationStageConfig
    distill: DistillStageConfig
    postprocess: PostprocessStageConfig
    mixture: MixtureStageConfig


class StageReport(TypedDict):
    name: str
    status: Literal["ran", "cached"]
    count: int
    dropped: int
    drop_reasons: dict[str, int]
    seconds: float


class RunReport(TypedDict):
    started: str
    finished: str
    seconds: float
    seed: int
    stages: list[StageReport]
