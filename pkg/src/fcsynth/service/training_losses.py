# SPDX-License-Identifier: MIT

"""SFT and multi-turn preference losses over tabular softmax policies."""

from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from fcsynth.errors import InputValidationError
from fcsynth.model.losses import LossConfig, TokenizedTrajectory, ToyInstance, TrajectoryPairTokens
from fcsynth.template.losses import get_loss_config_template

Array = NDArray[np.float64]


class UnknownTokenError(InputValidationError):
    pass


class CategoricalPolicy:
    """One softmax distribution over the action vocabulary per state."""

    def __init__(self, states: list[str], vocab: list[str], logits: Any) -> None:
        matrix = np.asarray(logits, dtype=np.float64)
        if matrix.shape != (len(states), len(vocab)):
            raise InputValidationError(
                f"logits shape {matrix.shape} does not match {len(states)} states x {len(vocab)} actions"
            )
        self.states = list(states)
        self.vocab = list(vocab)
        self.logits: Array = matrix
        self._state_index = {state: i for i, state in enumerate(self.states)}
        self._action_index = {action: j for j, action in enumerate(self.vocab)}

    @classmethod
    def from_probabilities(
        cls, states: list[str], vocab: list[str], table: Any
    ) -> "CategoricalPolicy":
        probs = np.asarray(table, dtype=np.float64)
        if np.any(probs <= 0):
            raise InputValidationError("probabilities must be strictly positive")
        return cls(states, vocab, np.log(probs))

    def with_logits(self, logits: Array) -> "CategoricalPolicy":
        return CategoricalPolicy(self.states, self.vocab, logits)

    def index(self, state: str, action: str) -> tuple[int, int]:
        try:
            return (self._state_index[state], self._action_index[action])
        except KeyError as e:
            raise UnknownTokenError(f"no table entry for ({state}, {action})") from e

    def log_probs(self) -> Array:
        shifted = self.logits - self.logits.max(axis=1, keepdims=True)
        return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))

    def probs(self) -> Array:
        return np.exp(self.log_probs())

    def log_prob(self, state: str, action: str) -> float:
        i, j = self.index(state, action)
        return float(self.log_probs()[i, j])


def masked_steps(traj: TokenizedTrajectory) -> list[tuple[str, str]]:
    if len(traj["action_mask"]) != len(traj["steps"]):
        raise InputValidationError("action_mask and steps differ in length")
    steps = [(s, a) for (s, a), keep in zip(traj["steps"], traj["action_mask"]) if keep]
    if not steps:
        raise InputValidationError("trajectory has no model-action step")
    return steps


def _log_prob_grad(policy: CategoricalPolicy, state: str, action: str) -> Array:
    """Gradient of log pi(action | state) with respect to every logit."""
    i, j = policy.index(state, action)
    grad = np.zeros_like(policy.logits)
    grad[i] = -policy.probs()[i]
    grad[i, j] += 1.0
    return grad


def sft_loss(policy: CategoricalPolicy, traj: TokenizedTrajectory, reduction: str = "mean") -> float:
    steps = masked_steps(traj)
    total = -sum(policy.log_prob(s, a) for s, a in steps)
    return total / len(steps) if reduction == "mean" else total


def _sft_grad(policy: CategoricalPolicy, traj: TokenizedTrajectory, reduction: str) -> Array:
    steps = masked_steps(traj)
    grad = -sum((_log_prob_grad(policy, s, a) for s, a in steps), np.zeros_like(policy.logits))
    return grad / len(steps) if reduction == "mean" else grad


def _ratio(theta: CategoricalPolicy, ref: CategoricalPolicy, state: str, action: str) -> float:
    return float(np.exp(theta.log_prob(state, action) - ref.log_prob(state, action)))


def preference_margin(
    theta: CategoricalPolicy,
    ref: CategoricalPolicy,
    pair: TrajectoryPairTokens,
    cfg: LossConfig,
) -> float:
    """The quantity inside the sigmoid."""
    chosen, rejected = masked_steps(pair["chosen"]), masked_steps(pair["rejected"])
    if cfg["form"] == "as-printed":
        return cfg["eta"] * (
            sum(_ratio(theta, ref, s, a) for s, a in rejected)
            - sum(_ratio(theta, ref, s, a) for s, a in chosen)
        )

    def log_ratio(steps: list[tuple[str, str]]) -> float:
        return sum(theta.log_prob(s, a) - ref.log_prob(s, a) for s, a in steps)

    return cfg["eta"] * (log_ratio(chosen) - log_ratio(rejected))


def _margin_grad(
    theta: CategoricalPolicy,
    ref: CategoricalPolicy,
    pair: TrajectoryPairTokens,
    cfg: LossConfig,
) -> Array:
    chosen, rejected = masked_steps(pair["chosen"]), masked_steps(pair["rejected"])
    grad = np.zeros_like(theta.logits)
    if cfg["form"] == "as-printed":
        for s, a in rejected:
            grad += _ratio(theta, ref, s, a) * _log_prob_grad(theta, s, a)
        for s, a in chosen:
            grad -= _ratio(theta, ref, s, a) * _log_prob_grad(theta, s, a)
    else:
        for s, a in chosen:
            grad += _log_prob_grad(theta, s, a)
        for s, a in rejected:
            grad -= _log_prob_grad(theta, s, a)
    return cfg["eta"] * grad


def _check_config(cfg: LossConfig) -> None:
    if cfg["lambda"] < 0:
        raise InputValidationError("lambda must be non-negative")
    if cfg["eta"] <= 0:
        raise InputValidationError("eta must be positive")
    if cfg["form"] not in ("log-ratio", "as-printed"):
        raise InputValidationError(f"unknown loss form {cfg['form']!r}")


def preference_loss(
    theta: CategoricalPolicy,
    ref: CategoricalPolicy,
    pair: TrajectoryPairTokens,
    cfg: Optional[LossConfig] = None,
) -> float:
    cfg = cfg or get_loss_config_template()
    _check_config(cfg)
    # -log sigmoid(x), stable for large |x|
    return float(np.logaddexp(0.0, -preference_margin(theta, ref, pair, cfg)))


def combined_loss(
    theta: CategoricalPolicy,
    ref: CategoricalPolicy,
    pair: TrajectoryPairTokens,
    cfg: Optional[LossConfig] = None,
) -> float:
    cfg = cfg or get_loss_config_template()
    sft = sft_loss(theta, pair["chosen"], cfg["reduction"])
    if cfg["lambda"] == 0:
        _check_config(cfg)
        return sft
    return sft + cfg["lambda"] * preference_loss(theta, ref, pair, cfg)


def grad_combined(
    theta: CategoricalPolicy,
    ref: CategoricalPolicy,
    pair: TrajectoryPairTokens,
    cfg: Optional[LossConfig] = None,
) -> Array:
    """Analytic gradient of combined_loss with respect to theta's logits."""
    cfg = cfg or get_loss_config_template()
    _check_config(cfg)
    grad = _sft_grad(theta, pair["chosen"], cfg["reduction"])
    if cfg["lambda"] == 0:
        return grad
    margin = preference_margin(theta, ref, pair, cfg)
    # d/dx log(1 + e^-x) = -sigmoid(-x)
    weight = -1.0 / (1.0 + np.exp(margin))
    return grad + cfg["lambda"] * weight * _margin_grad(theta, ref, pair, cfg)


def policies(instance: ToyInstance) -> tuple[CategoricalPolicy, CategoricalPolicy]:
    return (
        CategoricalPolicy(instance["states"], instance["vocab"], instance["theta_logits"]),
        CategoricalPolicy(instance["states"], instance["vocab"], instance["ref_logits"]),
    )


def instance_loss(
    theta: CategoricalPolicy, ref: CategoricalPolicy, instance: ToyInstance, cfg: LossConfig
) -> float:
    """Mean combined loss over the instance's pairs."""
    return float(np.mean([combined_loss(theta, ref, pair, cfg) for pair in instance["pairs"]]))


def instance_grad(
    theta: CategoricalPolicy, ref: CategoricalPolicy, instance: ToyInstance, cfg: LossConfig
) -> Array:
    grads = [grad_combined(theta, ref, pair, cfg) for pair in instance["pairs"]]
    return np.mean(grads, axis=0)


def finite_difference_grad(
    theta: CategoricalPolicy,
    ref: CategoricalPolicy,
    instance: ToyInstance,
    cfg: LossConfig,
    step: float = 1e-5,
) -> Array:
    grad = np.zeros_like(theta.logits)
    for index in np.ndindex(theta.logits.shape):
        up, down = theta.logits.copy(), theta.logits.copy()
        up[index] += step
        down[index] -= step
        grad[index] = (
            instance_loss(theta.with_logits(up), ref, instance, cfg)
            - instance_loss(theta.with_logits(down), ref, instance, cfg)
        ) / (2 * step)
    return grad


def finite_difference_check(
    instance: ToyInstance, cfg: Optional[LossConfig] = None, step: float = 1e-5
) -> float:
    """Max-norm relative error between the analytic and central-difference gradients."""
    cfg = cfg or get_loss_config_template()
    theta, ref = policies(instance)
    analytic = instance_grad(theta, ref, instance, cfg)
    numeric = finite_difference_grad(theta, ref, instance, cfg, step)
    scale = max(np.abs(analytic).max(), np.abs(numeric).max(), 1e-8)
    return float(np.abs(analytic - numeric).max() / scale)


def _random_trajectory(
    rng: np.random.Generator, states: list[str], vocab: list[str], length: int
) -> TokenizedTrajectory:
    steps = [[str(rng.choice(states)), str(rng.choice(vocab))] for _ in range(length)]
    mask = [bool(flag) for flag in rng.random(length) < 0.7]
    if not any(mask):
        mask[int(rng.integers(length))] = True
    return {"steps": steps, "action_mask": mask}


def random_toy_instance(
    rng: np.random.Generator,
    n_states: int = 3,
    n_actions: int = 4,
    n_pairs: int = 2,
    length: int = 4,
) -> ToyInstance:
    states = [f"s{i}" for i in range(n_states)]
    vocab = [f"a{j}" for j in range(n_actions)]
    return {
        "states": states,
        "vocab": vocab,
        "theta_logits": rng.normal(size=(n_states, n_actions)).tolist(),
        "ref_logits": rng.normal(size=(n_states, n_actions)).tolist(),
        "pairs": [
            {
                "chosen": _random_trajectory(rng, states, vocab, length),
                "rejected": _random_trajectory(rng, states, vocab, length),
            }
            for _ in range(n_pairs)
        ],
    }


def _trajectory_from_data(raw: Any, where: str) -> TokenizedTrajectory:
    if not isinstance(raw, dict) or "steps" not in raw:
        raise InputValidationError(f"{where}: expected an object with 'steps'")
    steps = [[str(s), str(a)] for s, a in raw["steps"]]
    mask = [bool(flag) for flag in raw.get("action_mask", [True] * len(steps))]
    return {"steps": steps, "action_mask": mask}


def toy_instance_from_data(data: Any) -> ToyInstance:
    if not isinstance(data, dict):
        raise InputValidationError("toy instance must be a JSON object")
    missing = [k for k in ("states", "vocab", "theta_logits", "ref_logits", "pairs") if k not in data]
    if missing:
        raise InputValidationError(f"toy instance lacks {', '.join(missing)}")
    try:
        instance: ToyInstance = {
            "states": [str(s) for s in data["states"]],
            "vocab": [str(a) for a in data["vocab"]],
            "theta_logits": [[float(x) for x in row] for row in data["theta_logits"]],
            "ref_logits": [[float(x) for x in row] for row in data["ref_logits"]],
            "pairs": [
                {
                    "chosen": _trajectory_from_data(pair["chosen"], f"pair {i} chosen"),
                    "rejected": _trajectory_from_data(pair["rejected"], f"pair {i} rejected"),
                }
                for i, pair in enumerate(data["pairs"])
            ],
        }
    except (KeyError, TypeError, ValueError) as e:
        raise InputValidationError(f"toy instance: {e}") from e
    if not instance["pairs"]:
        raise InputValidationError("toy instance has no pairs")
    policies(instance)
    return instance
