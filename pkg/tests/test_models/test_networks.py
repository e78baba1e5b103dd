import numpy as np
import pytest

from smrep.models.builtin import RecurrentSensorimotorEncoder, SensoryEncoder
from smrep.models.contracts import ArchitectureKind, ArchitectureSpec
from smrep.models.registry import registry
from smrep.nn.gradcheck import gradient_check
from smrep.utils.exceptions import CheckpointError, ConfigError, ShapeError
from tests.conftest import tiny_spec


def block(rng, T, B):
    return rng.uniform(0.0, 1.0, size=(T, B, 5)), rng.uniform(-1.0, 1.0, size=(T, B, 2))


def test_registry_knows_all_kinds():
    assert sorted(registry.registered_kinds()) == sorted(k.value for k in ArchitectureKind)


def test_registry_rejects_unknown_kind():
    with pytest.raises(ConfigError, match="unknown architecture"):
        registry.create("transformer")


def test_spec_kind_must_match_class():
    with pytest.raises(ConfigError):
        SensoryEncoder(ArchitectureSpec.for_kind("sm"))


def test_canonical_layer_sizes():
    s = registry.create("s")
    assert s.params["sensory.dense0.W"].shape == (16, 5)
    assert s.params["sensory.dense2.W"].shape == (64, 32)
    assert s.params["sensory.code.W"].shape == (10, 64)
    assert s.params["predictor.dense0.W"].shape == (128, 10)
    assert s.params["predictor.out.W"].shape == (5, 128)
    assert not any(name.startswith("motor.") for name in s.params)

    rsm = registry.create("recurrent-sm")
    assert rsm.params["sensory.dense0.W"].shape == (16, 5)
    for l in range(3):
        assert rsm.params[f"sensory.lstm{l}.Wh"].shape == (128, 32)
    assert rsm.params["sensory.lstm0.Wx"].shape == (128, 16)
    assert rsm.params["sensory.code.W"].shape == (10, 32)
    assert rsm.params["motor.code.W"].shape == (5, 16)
    assert rsm.params["predictor.dense0.W"].shape == (128, 15)
    np.testing.assert_array_equal(rsm.params["sensory.lstm1.b"][32:64], 1.0)


def test_forward_shapes(kind, rng):
    net = registry.create(tiny_spec(kind), seed=0)
    s, m = block(rng, 7, 3)
    encoded, state, _ = net.forward(s, m)
    assert encoded.z_s.shape == (7, 3, 3)
    assert encoded.s_hat.shape == (7, 3, 5)
    if kind.uses_motor:
        assert encoded.z_m.shape == (7, 3, 2)
        assert encoded.z_sm.shape == (7, 3, 5)
    else:
        assert encoded.z_m is None
        assert encoded.z_sm is encoded.z_s
    assert (state is not None) == kind.recurrent
    steps = list(encoded.steps(batch=1))
    assert len(steps) == 7
    np.testing.assert_array_equal(steps[2].s_hat_next, encoded.s_hat[2, 1])


def test_init_is_seeded(kind):
    a = registry.create(tiny_spec(kind), seed=5)
    b = registry.create(tiny_spec(kind), seed=5)
    assert all(a.params[k].tobytes() == b.params[k].tobytes() for k in a.params)


@pytest.mark.parametrize("kind", [ArchitectureKind.S, ArchitectureKind.RECURRENT_S], ids=lambda k: k.value)
def test_motorless_kinds_ignore_motors(kind, rng):
    net = registry.create(tiny_spec(kind), seed=0)
    s, m = block(rng, 6, 4)
    a = net.predict(s, m)
    b = net.predict(s, rng.uniform(-1.0, 1.0, size=m.shape))
    assert a.tobytes() == b.tobytes()
    np.testing.assert_array_equal(net.forward(s)[0].s_hat, net.forward(s, m)[0].s_hat)


@pytest.mark.parametrize("kind", [ArchitectureKind.SM, ArchitectureKind.RECURRENT_SM], ids=lambda k: k.value)
def test_motor_kinds_need_and_use_motors(kind, rng):
    net = registry.create(tiny_spec(kind), seed=0)
    s, m = block(rng, 6, 4)
    with pytest.raises(ShapeError, match="motor"):
        net.forward(s)
    assert not np.array_equal(net.predict(s, m), net.predict(s, rng.uniform(-1.0, 1.0, size=m.shape)))


def test_memoryless_code_depends_on_current_reading_only(rng):
    net = registry.create(tiny_spec("s"), seed=0)
    s, _ = block(rng, 8, 1)
    s[5] = s[2]
    z = net.encode_sensory(s)[0]
    np.testing.assert_allclose(z[5], z[2], rtol=0, atol=1e-15)


def test_recurrent_code_depends_on_history(rng):
    net = registry.create(tiny_spec("recurrent-s"), seed=0)
    s, _ = block(rng, 8, 2)
    s[-1, 1] = s[-1, 0]
    z = net.encode_sensory(s)[0]
    assert not np.allclose(z[-1, 0], z[-1, 1])


def test_recurrent_state_carries_over(rng):
    net = registry.create(tiny_spec("recurrent-sm"), seed=0)
    s, m = block(rng, 10, 2)
    whole, _, _ = net.forward(s, m)
    first, state, _ = net.forward(s[:4], m[:4])
    rest, _, _ = net.forward(s[4:], m[4:], state)
    np.testing.assert_allclose(np.concatenate([first.s_hat, rest.s_hat]), whole.s_hat, atol=1e-14)


def test_memoryless_kind_rejects_state(rng):
    net = registry.create(tiny_spec("sm"), seed=0)
    s, m = block(rng, 3, 1)
    with pytest.raises(ShapeError, match="memoryless"):
        net.forward(s, m, state=[(np.zeros((1, 3)), np.zeros((1, 3)))])


def test_bad_input_width(kind, rng):
    net = registry.create(tiny_spec(kind), seed=0)
    with pytest.raises(ShapeError):
        net.forward(rng.normal(size=(4, 2, 6)), rng.normal(size=(4, 2, 2)))


def test_forward_is_deterministic(kind, rng):
    net = registry.create(tiny_spec(kind), seed=0)
    s, m = block(rng, 6, 3)
    assert net.predict(s, m).tobytes() == net.predict(s, m).tobytes()


def test_wrong_parameter_set_rejected():
    params = registry.create("s").params
    del params["predictor.out.b"]
    with pytest.raises(CheckpointError, match="missing"):
        registry.create("s", params=params)


# ── gradients ─────────────────────────────────────────────────────────────


def test_whole_network_gradients(kind):
    rng = np.random.default_rng(11)
    net = registry.create(tiny_spec(kind), seed=3, dtype="float64")
    s, m = block(rng, 6 if kind.recurrent else 2, 5)
    _, grads = net.loss_and_grads(s, m)
    assert set(grads) == set(net.params)
    report = gradient_check(net.objective(s, m), net.params, grads, samples_per_tensor=60, floor=1e-5)
    tolerance = 1e-5 if kind.recurrent else 1e-6
    assert report.passed(tolerance), report.per_tensor


@pytest.mark.slow
def test_canonical_recurrent_sm_gradients_over_a_full_window():
    rng = np.random.default_rng(0)
    net = RecurrentSensorimotorEncoder(ArchitectureSpec.for_kind("recurrent-sm"), seed=1, dtype="float64")
    s, m = block(rng, 21, 2)
    _, grads = net.loss_and_grads(s, m)
    assert net.objective(s, m)()[0] >= 0.0
    report = gradient_check(net.objective(s, m), net.params, grads, floor=1e-5)
    assert report.passed(1e-5), report.per_tensor


@pytest.mark.parametrize("config", range(20))
def test_canonical_recurrent_sm_gradients_on_random_configurations(config):
    rng = np.random.default_rng(100 + config)
    net = RecurrentSensorimotorEncoder(ArchitectureSpec.for_kind("recurrent-sm"), seed=config, dtype="float64")
    s, m = block(rng, 20, int(rng.integers(1, 5)))
    _, grads = net.loss_and_grads(s, m)
    report = gradient_check(net.objective(s, m), net.params, grads, samples_per_tensor=8, seed=config, floor=1e-5)
    assert report.passed(1e-5), report.per_tensor


def test_constant_output_has_zero_upstream_gradient(kind, rng):
    net = registry.create(tiny_spec(kind), seed=0)
    net.params["predictor.out.W"][...] = 0.0
    s, m = block(rng, 5, 3)
    _, grads = net.loss_and_grads(s, m)
    for name, value in grads.items():
        if not name.startswith("predictor.out"):
            assert not value.any(), name


def test_loss_is_mean_over_steps_batch_and_dims(rng):
    net = registry.create(tiny_spec("recurrent-sm"), seed=0)
    s, m = block(rng, 6, 3)
    loss, _ = net.loss_and_grads(s, m)
    assert loss == pytest.approx(np.mean((net.predict(s, m) - s[1:]) ** 2), rel=1e-14)
