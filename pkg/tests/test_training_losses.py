import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcsynth.errors import InputValidationError
from fcsynth.model.losses import LossConfig
from fcsynth.service.training_losses import (
    CategoricalPolicy,
    UnknownTokenError,
    combined_loss,
    finite_difference_check,
    grad_combined,
    masked_steps,
    preference_loss,
    preference_margin,
    policies,
    random_toy_instance,
    sft_loss,
    toy_instance_from_data,
)

FIXTURE = Path(__file__).parent / "fixtures" / "toy_losses.json"


def _cfg(form: str = "log-ratio", lam: float = 1.0, eta: float = 1.0) -> LossConfig:
    return {"lambda": lam, "eta": eta, "form": form, "reduction": "mean"}  # type: ignore[typeddict-item]


@pytest.fixture
def toy():
    return toy_instance_from_data(json.loads(FIXTURE.read_text()))


def test_uniform_policy_sft_is_log_vocab_size():
    policy = CategoricalPolicy(["s"], ["a", "b", "c", "d"], np.zeros((1, 4)))
    traj = {"steps": [["s", "a"], ["s", "b"]], "action_mask": [True, True]}
    assert sft_loss(policy, traj) == pytest.approx(math.log(4))
    assert sft_loss(policy, traj, "sum") == pytest.approx(2 * math.log(4))


def test_masked_steps_skip_observations():
    traj = {"steps": [["s", "a"], ["s", "b"], ["s", "c"]], "action_mask": [True, False, True]}
    assert masked_steps(traj) == [("s", "a"), ("s", "c")]


def test_masked_steps_reject_empty_mask():
    traj = {"steps": [["s", "a"]], "action_mask": [False]}
    with pytest.raises(InputValidationError):
        masked_steps(traj)


def test_unknown_token_is_reported():
    policy = CategoricalPolicy(["s"], ["a"], np.zeros((1, 1)))
    with pytest.raises(UnknownTokenError):
        policy.log_prob("s", "zzz")


def test_logit_shape_must_match_tables():
    with pytest.raises(InputValidationError):
        CategoricalPolicy(["s0", "s1"], ["a"], np.zeros((1, 1)))


def test_from_probabilities_rejects_zero():
    with pytest.raises(InputValidationError):
        CategoricalPolicy.from_probabilities(["s"], ["a", "b"], [[1.0, 0.0]])


@pytest.mark.parametrize("form", ["log-ratio", "as-printed"])
def test_preference_loss_is_ln2_when_policy_equals_reference(toy, form):
    _, ref = policies(toy)
    for pair in toy["pairs"]:
        assert preference_loss(ref, ref, pair, _cfg(form)) == pytest.approx(math.log(2), abs=1e-9)


def test_zero_lambda_reduces_to_sft(toy):
    theta, ref = policies(toy)
    for pair in toy["pairs"]:
        assert combined_loss(theta, ref, pair, _cfg(lam=0.0)) == sft_loss(theta, pair["chosen"])


def test_margin_sign_follows_preference(toy):
    theta, ref = policies(toy)
    pair = toy["pairs"][1]
    boosted = theta.logits.copy()
    # make the chosen actions near-certain
    boosted[theta.index("s1", "a1")] += 10.0
    boosted[theta.index("s2", "a1")] += 10.0
    assert preference_margin(theta.with_logits(boosted), ref, pair, _cfg()) > 0
    assert preference_loss(theta.with_logits(boosted), ref, pair, _cfg()) < math.log(2)


@pytest.mark.parametrize(
    "cfg",
    [
        {"lambda": -1.0, "eta": 1.0, "form": "log-ratio", "reduction": "mean"},
        {"lambda": 1.0, "eta": 0.0, "form": "log-ratio", "reduction": "mean"},
        {"lambda": 1.0, "eta": 1.0, "form": "squared", "reduction": "mean"},
    ],
)
def test_invalid_config_is_rejected(toy, cfg):
    theta, ref = policies(toy)
    with pytest.raises(InputValidationError):
        grad_combined(theta, ref, toy["pairs"][0], cfg)


@pytest.mark.parametrize("form", ["log-ratio", "as-printed"])
def test_gradient_matches_finite_differences_on_random_instances(form):
    rng = np.random.default_rng(7)
    errors = [finite_difference_check(random_toy_instance(rng), _cfg(form)) for _ in range(20)]
    assert max(errors) < 1e-4


def test_gradient_matches_finite_differences_on_fixture(toy):
    assert finite_difference_check(toy, _cfg()) < 1e-4
    assert finite_difference_check(toy, _cfg(lam=0.0)) < 1e-4


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.floats(min_value=0.1, max_value=3.0))
def test_gradient_check_holds_for_any_seed_and_eta(seed, eta):
    instance = random_toy_instance(np.random.default_rng(seed))
    assert finite_difference_check(instance, _cfg(eta=eta)) < 1e-4


def test_toy_instance_requires_all_tables():
    with pytest.raises(InputValidationError):
        toy_instance_from_data({"states": ["s"], "vocab": ["a"]})


def test_toy_instance_requires_pairs():
    data = json.loads(FIXTURE.read_text())
    data["pairs"] = []
    with pytest.raises(InputValidationError):
        toy_instance_from_data(data)
