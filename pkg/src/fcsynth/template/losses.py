# SPDX-License-Identifier: MIT

from fcsynth.model.losses import LossConfig


def get_loss_config_template() -> LossConfig:
    return {"lambda": 1.0, "eta": 1.0, "form": "log-ratio", "reduction": "mean"}
