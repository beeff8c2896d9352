# SPDX-License-Identifier: MIT

from fcsynth.model.pipeline import PipelineConfig
from fcsynth.template.mixture import DEFAULT_KEYWORDS


def get_pipeline_config_template() -> PipelineConfig:
    return {
        "pool_path": "",
        "work_dir": "fcsynth-run",
        "seed": 0,
        "jobs": None,
        "graph": {
            "k_cand": 30,
            "cross_category": False,
            "judge": "mock",
            "classify": False,
        },
        "walk": {
            "steps": 7,
            "count": 100,
            "min_turns": 2,
            "forbid_backtrack": False,
        },
        "node_ops": {
            "merge_p": 0.3,
            "q_long": 0.5,
            "miss_label": None,
            "judge": "mock",
        },
        "translation": {
            "backend": "mock",
            "retries": 2,
            "min_turns": 2,
            "error_rate": 0.0,
        },
        "distill": {
            "teacher": "mock",
            "student": "mock",
            "judge": "mock",
            "negatives": True,
            "rollouts": 10,
            "selection": "first",
            "one_at_a_time": False,
            "max_steps": 8,
            "student_error_rate": 0.3,
        },
        "postprocess": {
            "keywords": list(DEFAULT_KEYWORDS),
            "shuffle": True,
            "irrelevance_tools": 3,
        },
        "mixture": {
            "n_single_turn": None,
            "n_multi_turn": None,
            "n_irrelevance": None,
        },
    }
