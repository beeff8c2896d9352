# SPDX-License-Identifier: MIT

from fcsynth.model.mixture import MixtureConfig

DEFAULT_KEYWORDS: tuple[str, ...] = ("Bad request", "does not match")


def get_mixture_config_template() -> MixtureConfig:
    # irrelevance share 5000 / 33000, inside the 15-17% band
    return {
        "n_single_turn": 20000,
        "n_multi_turn": 8000,
        "n_irrelevance": 5000,
        "seed": 0,
    }
