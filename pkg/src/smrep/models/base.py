"""
smrep/models/base.py
────────────────────
Abstract base for every sensorimotor prediction network.

A network is three paths over named parameter tensors:

    sensors s_t ─▶ [sensory trunk] ─▶ linear ─▶ z_s ┐
    motors  m_t ─▶ [dense 16..]    ─▶ linear ─▶ z_m ┴▶ dense 128 (ReLU) ─▶ linear ─▶ ŝ_{t+1}

The motor path exists only for sensorimotor kinds; motorless kinds never read m_t.

To add a new architecture:
  1. Subclass SensorimotorNetwork (or one of the trunk families in builtin.py)
  2. Implement the four ``_trunk_*`` hooks
  3. Register it in models/registry.py
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar, Optional

import numpy as np

from smrep.config import settings
from smrep.models.contracts import ArchitectureKind, ArchitectureSpec, EncodedSequence
from smrep.nn.layers import Activation, DenseLayer, dense_backward, dense_forward, relu_pattern
from smrep.nn.losses import mse_loss
from smrep.nn.lstm import LstmState
from smrep.nn.parameters import InitKind, Parameters, ParameterSpec, init_parameters
from smrep.utils.exceptions import CheckpointError, ConfigError, ShapeError


def dense_plan(prefix: str, fan_in: int, fan_out: int) -> list[ParameterSpec]:
    return [
        ParameterSpec(f"{prefix}.W", (fan_out, fan_in), InitKind.WEIGHT, fan_in, fan_out),
        ParameterSpec(f"{prefix}.b", (fan_out,), InitKind.BIAS),
    ]


@dataclass
class ForwardCache:
    trunk: Any
    features: np.ndarray
    motor_inputs: list[np.ndarray]
    z: np.ndarray
    hidden: np.ndarray
    relu_inputs: list[tuple[DenseLayer, np.ndarray]] = field(default_factory=list)


class SensorimotorNetwork(ABC):
    """
    Every architecture follows this contract.

        encoded, state, cache = net.forward(sensors, motors, state)
        grads = net.backward(cache, dL_ds_hat)

    Inputs are time-major blocks (T, B, features) of normalized values.
    """

    kind: ClassVar[ArchitectureKind]
    uses_motor: ClassVar[bool] = False
    recurrent: ClassVar[bool] = False

    def __init__(
        self,
        spec: ArchitectureSpec,
        params: Optional[Parameters] = None,
        seed: int = 0,
        dtype: Optional[str] = None,
    ) -> None:
        if spec.kind is not self.kind:
            raise ConfigError(f"{type(self).__name__} cannot be built from a '{spec.kind.value}' spec")
        self.spec = spec
        plan = self.parameter_plan()
        if params is None:
            params = init_parameters(plan, seed, dtype or settings.float_dtype)
        else:
            _check_parameters(plan, params)
        self.params: Parameters = params
        self._layers: dict[str, DenseLayer] = {}
        self._build()

    # ── Subclasses must provide ────────────────────────────────────────────

    @property
    @abstractmethod
    def trunk_features(self) -> int:
        """Width of the sensory trunk output that feeds the z_s code layer."""

    @abstractmethod
    def _trunk_plan(self) -> list[ParameterSpec]:
        ...

    @abstractmethod
    def _build_trunk(self) -> None:
        ...

    @abstractmethod
    def _trunk_forward(self, sensors: np.ndarray, state: Optional[LstmState]):
        """Return (features, final state or None, trunk cache)."""

    @abstractmethod
    def _trunk_backward(self, cache: Any, d_features: np.ndarray, grads: Parameters) -> None:
        ...

    def _trunk_relu(self, cache: Any) -> list[tuple[DenseLayer, np.ndarray]]:
        return []

    def zero_state(self, batch: int) -> Optional[LstmState]:
        return None

    # ── Layer plan ─────────────────────────────────────────────────────────

    @property
    def window_length(self) -> Optional[int]:
        """Evaluation window (None: every transition is scored independently)."""
        return self.spec.horizon if self.recurrent else None

    @property
    def architecture_id(self) -> str:
        return self.kind.value

    def parameter_plan(self) -> list[ParameterSpec]:
        spec = self.spec
        plan = self._trunk_plan()
        plan += dense_plan("sensory.code", self.trunk_features, spec.sensory_dims)
        if self.uses_motor:
            prev = spec.motor_inputs
            for i, width in enumerate(spec.encoder_hidden):
                plan += dense_plan(f"motor.dense{i}", prev, width)
                prev = width
            plan += dense_plan("motor.code", prev, spec.motor_dims)
        plan += dense_plan("predictor.dense0", spec.code_dims, spec.predictor_hidden)
        plan += dense_plan("predictor.out", spec.predictor_hidden, spec.sensor_inputs)
        return plan

    def _dense(self, prefix: str, activation: Activation) -> DenseLayer:
        layer = DenseLayer(self.params[f"{prefix}.W"], self.params[f"{prefix}.b"], activation)
        self._layers[prefix] = layer
        return layer

    def _build(self) -> None:
        self._build_trunk()
        self.sensory_code = self._dense("sensory.code", Activation.IDENTITY)
        self.motor_layers: list[DenseLayer] = []
        if self.uses_motor:
            self.motor_layers = [
                self._dense(f"motor.dense{i}", Activation.RELU) for i in range(len(self.spec.encoder_hidden))
            ]
            self.motor_code = self._dense("motor.code", Activation.IDENTITY)
        self.predictor_hidden = self._dense("predictor.dense0", Activation.RELU)
        self.predictor_out = self._dense("predictor.out", Activation.IDENTITY)

    def _backprop_dense(self, prefix: str, x: np.ndarray, dy: np.ndarray, grads: Parameters) -> np.ndarray:
        dx, grads[f"{prefix}.W"], grads[f"{prefix}.b"] = dense_backward(self._layers[prefix], x, dy)
        return dx

    # ── Forward / backward ─────────────────────────────────────────────────

    def encode_sensory(self, sensors: np.ndarray, state: Optional[LstmState] = None):
        """z_s only: (T, B, sensory_dims) plus the final recurrent state."""
        sensors = _check_block(sensors, self.spec.sensor_inputs, "sensors")
        features, final_state, _ = self._trunk_forward(sensors, self._check_state(state))
        return dense_forward(self.sensory_code, features), final_state

    def forward(
        self,
        sensors: np.ndarray,
        motors: Optional[np.ndarray] = None,
        state: Optional[LstmState] = None,
    ) -> tuple[EncodedSequence, Optional[LstmState], ForwardCache]:
        sensors = _check_block(sensors, self.spec.sensor_inputs, "sensors")
        state = self._check_state(state)
        features, final_state, trunk_cache = self._trunk_forward(sensors, state)
        z_s = dense_forward(self.sensory_code, features)
        relu_inputs = self._trunk_relu(trunk_cache)

        z_m = None
        motor_inputs: list[np.ndarray] = []
        if self.uses_motor:
            if motors is None:
                raise ShapeError(f"'{self.architecture_id}' needs motor commands")
            x = _check_block(motors, self.spec.motor_inputs, "motors")
            if x.shape[:2] != sensors.shape[:2]:
                raise ShapeError(f"motors {x.shape} do not align with sensors {sensors.shape}")
            for layer in self.motor_layers:
                motor_inputs.append(x)
                relu_inputs.append((layer, x))
                x = dense_forward(layer, x)
            motor_inputs.append(x)
            z_m = dense_forward(self.motor_code, x)
            z = np.concatenate([z_s, z_m], axis=-1)
        else:
            z = z_s

        hidden = dense_forward(self.predictor_hidden, z)
        relu_inputs.append((self.predictor_hidden, z))
        s_hat = dense_forward(self.predictor_out, hidden)
        cache = ForwardCache(trunk_cache, features, motor_inputs, z, hidden, relu_inputs)
        return EncodedSequence(z_s=z_s, z_m=z_m, s_hat=s_hat), final_state, cache

    def backward(self, cache: ForwardCache, d_s_hat: np.ndarray) -> Parameters:
        """Gradients of the loss w.r.t. every parameter, given dL/dŝ."""
        grads: Parameters = {}
        dh = self._backprop_dense("predictor.out", cache.hidden, d_s_hat, grads)
        dz = self._backprop_dense("predictor.dense0", cache.z, dh, grads)
        dz_s = dz[..., : self.spec.sensory_dims]
        if self.uses_motor:
            dx = self._backprop_dense("motor.code", cache.motor_inputs[-1], dz[..., self.spec.sensory_dims:], grads)
            for i in range(len(self.motor_layers) - 1, -1, -1):
                dx = self._backprop_dense(f"motor.dense{i}", cache.motor_inputs[i], dx, grads)
        d_features = self._backprop_dense("sensory.code", cache.features, dz_s, grads)
        self._trunk_backward(cache.trunk, d_features, grads)
        return grads

    # ── Windows ────────────────────────────────────────────────────────────

    def loss_and_grads(self, sensors: np.ndarray, motors: np.ndarray) -> tuple[float, Parameters]:
        """
        MSE of predicting sensors[1:] from the window's first W-1 steps, zero initial state.
        ``sensors`` (W, B, 5), ``motors`` (W, B, 2).
        """
        encoded, _, cache = self.forward(sensors[:-1], motors[:-1] if self.uses_motor else None)
        loss, d_s_hat = mse_loss(encoded.s_hat, sensors[1:])
        return loss, self.backward(cache, d_s_hat)

    def objective(self, sensors: np.ndarray, motors: np.ndarray) -> Callable[[], tuple[float, bytes]]:
        """Forward-only loss closure for gradient checking; also returns the ReLU activation pattern."""

        def _run() -> tuple[float, bytes]:
            encoded, _, cache = self.forward(sensors[:-1], motors[:-1] if self.uses_motor else None)
            loss, _ = mse_loss(encoded.s_hat, sensors[1:])
            pattern = b"".join(np.packbits(relu_pattern(layer, x)).tobytes() for layer, x in cache.relu_inputs)
            return loss, pattern

        return _run

    def predict(self, sensors: np.ndarray, motors: np.ndarray) -> np.ndarray:
        """Predictions of sensors[1:] for a (W, B, ·) block of windows, each from zero state."""
        encoded, _, _ = self.forward(sensors[:-1], motors[:-1] if self.uses_motor else None)
        return encoded.s_hat

    # ── Helpers ────────────────────────────────────────────────────────────

    def _check_state(self, state: Optional[LstmState]) -> Optional[LstmState]:
        if state is not None and not self.recurrent:
            raise ShapeError(f"'{self.architecture_id}' is memoryless and takes no recurrent state")
        return state

    def __repr__(self) -> str:
        return f"{type(self).__name__}(kind={self.kind.value!r}, tensors={len(self.params)})"


def _check_block(values: np.ndarray, width: int, what: str) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim != 3 or values.shape[2] != width or values.shape[0] < 1:
        raise ShapeError(f"{what} must be (T >= 1, B, {width}), got {values.shape}")
    return values


def _check_parameters(plan: list[ParameterSpec], params: Parameters) -> None:
    expected = {p.name: p.shape for p in plan}
    if set(expected) != set(params):
        raise CheckpointError(
            f"parameter names do not match the architecture: "
            f"missing {sorted(set(expected) - set(params))}, unexpected {sorted(set(params) - set(expected))}"
        )
    for name, shape in expected.items():
        if params[name].shape != shape:
            raise CheckpointError(f"parameter '{name}' has shape {params[name].shape}, expected {shape}")
