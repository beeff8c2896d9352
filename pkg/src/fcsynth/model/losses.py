# SPDX-License-Identifier: MIT

from typing import Literal, TypedDict

LossForm = Literal["log-ratio", "as-printed"]
Reduction = Literal["mean", "sum"]


class TokenizedTrajectory(TypedDict):
    steps: list[list[str]]  # [state_id, action_id]
    action_mask: list[bool]


class TrajectoryPairTokens(TypedDict):
    chosen: TokenizedTrajectory
    rejected: TokenizedTrajectory


# "lambda" is a keyword, hence the functional form
LossConfig = TypedDict(
    "LossConfig",
    {"lambda": float, "eta": float, "form": LossForm, "reduction": Reduction},
)


class ToyInstance(TypedDict):
    states: list[str]
    vocab: list[str]
    theta_logits: list[list[float]]
    ref_logits: list[list[float]]
    pairs: list[TrajectoryPairTokens]
