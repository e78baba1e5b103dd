import math

import numpy as np
import pytest

from smrep.nn.optim import AdamState, adam_step
from smrep.nn.parameters import InitKind, ParameterSpec, glorot_bound, init_parameters
from smrep.utils.exceptions import ShapeError


def test_zero_gradient_leaves_params_and_counts_step():
    params = {"w": np.array([1.0, -2.0])}
    params, state = adam_step(params, {"w": np.zeros(2)}, AdamState())
    np.testing.assert_array_equal(params["w"], [1.0, -2.0])
    assert state.t == 1


def test_first_step_moves_by_learning_rate():
    params = {"w": np.array([0.0, 0.0, 0.0])}
    g = np.array([3.0, -0.5, 100.0])
    adam_step(params, {"w": g}, AdamState(lr=0.001))
    np.testing.assert_allclose(params["w"], -0.001 * np.sign(g), rtol=1e-6)


def test_two_steps_match_scalar_reference():
    lr, b1, b2, eps = 0.001, 0.9, 0.999, 1e-8
    grads = [0.7, -0.2]
    w, m, v = 1.5, 0.0, 0.0
    for t, g in enumerate(grads, start=1):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        w -= lr * (m / (1 - b1 ** t)) / (math.sqrt(v / (1 - b2 ** t)) + eps)

    params = {"w": np.array([1.5])}
    state = AdamState()
    for g in grads:
        adam_step(params, {"w": np.array([g])}, state)
    assert params["w"][0] == pytest.approx(w, abs=1e-12)
    assert state.t == 2


def test_zero_learning_rate_is_identity(rng):
    params = {"a": rng.normal(size=(3, 3)), "b": rng.normal(size=3)}
    before = {k: v.copy() for k, v in params.items()}
    state = AdamState(lr=0.0)
    for _ in range(3):
        adam_step(params, {k: rng.normal(size=v.shape) for k, v in params.items()}, state)
    for k in params:
        np.testing.assert_array_equal(params[k], before[k])


def test_updates_in_place(rng):
    w = rng.normal(size=4)
    params = {"w": w}
    adam_step(params, {"w": np.ones(4)}, AdamState())
    assert params["w"] is w


def test_mismatched_gradients():
    with pytest.raises(ShapeError):
        adam_step({"w": np.zeros(2)}, {"w": np.zeros(3)}, AdamState())
    with pytest.raises(ShapeError):
        adam_step({"w": np.zeros(2)}, {"v": np.zeros(2)}, AdamState())


# ── initialization ────────────────────────────────────────────────────────


PLAN = [
    ParameterSpec("dense.W", (128, 128), InitKind.WEIGHT, 128, 128),
    ParameterSpec("dense.b", (128,), InitKind.BIAS),
    ParameterSpec("lstm.b", (16,), InitKind.LSTM_BIAS),
]


def test_init_is_deterministic():
    a, b = init_parameters(PLAN, seed=3), init_parameters(PLAN, seed=3)
    assert all(a[k].tobytes() == b[k].tobytes() for k in a)
    assert init_parameters(PLAN, seed=4)["dense.W"].tobytes() != a["dense.W"].tobytes()


def test_biases_zero_except_forget_gate():
    params = init_parameters(PLAN, seed=0)
    np.testing.assert_array_equal(params["dense.b"], 0.0)
    np.testing.assert_array_equal(params["lstm.b"], [0.0] * 4 + [1.0] * 4 + [0.0] * 8)


def test_weight_spread_matches_uniform_variance():
    W = init_parameters(PLAN, seed=0)["dense.W"]
    bound = glorot_bound(128, 128)
    assert np.abs(W).max() <= bound
    assert W.std() == pytest.approx(bound / math.sqrt(3.0), rel=0.05)


def test_init_dtype():
    assert init_parameters(PLAN, seed=0, dtype="float32")["dense.W"].dtype == np.float32
