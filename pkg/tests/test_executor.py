import math

from fcsynth.service.executor import ERROR_TEXTS, SimulatedExecutor, simulated_execute


def _call(**args):
    return {"name": "order_dish", "args": args}


def test_outputs_follow_the_response_fields(pool):
    output = simulated_execute(_call(dish_id="d1", quantity=2), pool.by_id("order_dish"), seed=1)
    assert not output["is_error"]
    assert set(output["payload"]) == {"order_id", "eta_minutes"}
    assert isinstance(output["payload"]["order_id"], str)
    assert isinstance(output["payload"]["eta_minutes"], int)


def test_outputs_are_keyed_on_seed_and_arguments(pool):
    sig = pool.by_id("order_dish")
    first = simulated_execute(_call(dish_id="d1", quantity=2), sig, seed=1)
    assert first == simulated_execute(_call(quantity=2, dish_id="d1"), sig, seed=1)
    assert first != simulated_execute(_call(dish_id="d1", quantity=2), sig, seed=2)
    assert first != simulated_execute(_call(dish_id="d2", quantity=2), sig, seed=1)


def test_errors_carry_a_recognisable_keyword(pool):
    output = simulated_execute(_call(dish_id="d1", quantity=2), pool.by_id("order_dish"), 1, 1.0)
    assert output["is_error"]
    assert output["payload"]["error"] in ERROR_TEXTS


def test_every_injected_error_is_a_bad_request(pool):
    sig = pool.by_id("order_dish")
    texts = set()
    for seed in range(50):
        output = simulated_execute(_call(dish_id=f"d{seed}", quantity=1), sig, seed, 1.0)
        assert output["is_error"]
        assert "Bad request" in output["payload"]["error"]
        texts.add(output["payload"]["error"])
    assert texts == set(ERROR_TEXTS)


def test_error_rate_is_respected(pool):
    trials = 2_000
    sig = pool.by_id("order_dish")
    errors = sum(
        simulated_execute(_call(dish_id=f"d{i}", quantity=1), sig, 7, 0.3)["is_error"]
        for i in range(trials)
    )
    assert abs(errors / trials - 0.3) < 3 * math.sqrt(0.21 / trials)


def test_unknown_function_is_a_bad_request():
    output = SimulatedExecutor(0).execute({"name": "teleport", "args": {}}, None)
    assert output["is_error"]
    assert output["payload"]["error"].startswith("Bad request")
