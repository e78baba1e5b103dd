"""
smrep/models/builtin.py
───────────────────────
The built-in architectures.  Two sensory trunk families (feed-forward and
LSTM) times two input sets (sensors only, sensors + motors).
Adding a new architecture = add a class below + register it in registry.py.
"""
from __future__ import annotations

from typing import Any, Optional

import numpy as np

from smrep.models.base import SensorimotorNetwork, dense_plan
from smrep.models.contracts import ArchitectureKind
from smrep.nn.layers import Activation, DenseLayer, dense_forward
from smrep.nn.lstm import LstmLayer, LstmStack, LstmState, lstm_backward, lstm_forward
from smrep.nn.parameters import InitKind, Parameters, ParameterSpec


# ─────────────────────────────────────────────
# Trunk families
# ─────────────────────────────────────────────

class FeedForwardNetwork(SensorimotorNetwork):
    """Memoryless: z_s depends on the current reading only (dense 16, 32, 64)."""

    @property
    def trunk_features(self) -> int:
        return self.spec.encoder_hidden[-1] if self.spec.encoder_hidden else self.spec.sensor_inputs

    def _trunk_plan(self) -> list[ParameterSpec]:
        plan: list[ParameterSpec] = []
        prev = self.spec.sensor_inputs
        for i, width in enumerate(self.spec.encoder_hidden):
            plan += dense_plan(f"sensory.dense{i}", prev, width)
            prev = width
        return plan

    def _build_trunk(self) -> None:
        self.sensory_layers = [
            self._dense(f"sensory.dense{i}", Activation.RELU) for i in range(len(self.spec.encoder_hidden))
        ]

    def _trunk_forward(self, sensors: np.ndarray, state: Optional[LstmState]):
        inputs = []
        x = sensors
        for layer in self.sensory_layers:
            inputs.append(x)
            x = dense_forward(layer, x)
        return x, None, inputs

    def _trunk_backward(self, cache: Any, d_features: np.ndarray, grads: Parameters) -> None:
        dx = d_features
        for i in range(len(self.sensory_layers) - 1, -1, -1):
            dx = self._backprop_dense(f"sensory.dense{i}", cache[i], dx, grads)

    def _trunk_relu(self, cache: Any) -> list[tuple[DenseLayer, np.ndarray]]:
        return list(zip(self.sensory_layers, cache))


class RecurrentNetwork(SensorimotorNetwork):
    """Dense 16 then a stacked LSTM (3 x 32); state is zeroed at every window start."""

    recurrent = True

    @property
    def trunk_features(self) -> int:
        return self.spec.lstm_units

    def _trunk_plan(self) -> list[ParameterSpec]:
        plan: list[ParameterSpec] = []
        prev = self.spec.sensor_inputs
        for i, width in enumerate(self.spec.encoder_hidden):
            plan += dense_plan(f"sensory.dense{i}", prev, width)
            prev = width
        H = self.spec.lstm_units
        for l in range(self.spec.lstm_layers):
            plan += [
                ParameterSpec(f"sensory.lstm{l}.Wx", (4 * H, prev), InitKind.WEIGHT, prev, 4 * H),
                ParameterSpec(f"sensory.lstm{l}.Wh", (4 * H, H), InitKind.WEIGHT, H, 4 * H),
                ParameterSpec(f"sensory.lstm{l}.b", (4 * H,), InitKind.LSTM_BIAS),
            ]
            prev = H
        return plan

    def _build_trunk(self) -> None:
        self.sensory_layers = [
            self._dense(f"sensory.dense{i}", Activation.RELU) for i in range(len(self.spec.encoder_hidden))
        ]
        p = self.params
        self.lstm = LstmStack(
            [
                LstmLayer(p[f"sensory.lstm{l}.Wx"], p[f"sensory.lstm{l}.Wh"], p[f"sensory.lstm{l}.b"])
                for l in range(self.spec.lstm_layers)
            ]
        )

    def zero_state(self, batch: int) -> LstmState:
        return self.lstm.zero_state(batch, self.params["sensory.code.W"].dtype)

    def _trunk_forward(self, sensors: np.ndarray, state: Optional[LstmState]):
        inputs = []
        x = sensors
        for layer in self.sensory_layers:
            inputs.append(x)
            x = dense_forward(layer, x)
        hs, final_state, lstm_cache = lstm_forward(self.lstm, x, state)
        return hs, final_state, (inputs, lstm_cache)

    def _trunk_backward(self, cache: Any, d_features: np.ndarray, grads: Parameters) -> None:
        inputs, lstm_cache = cache
        layer_grads, dx = lstm_backward(self.lstm, lstm_cache, d_features)
        for l, g in enumerate(layer_grads):
            for key, value in g.items():
                grads[f"sensory.lstm{l}.{key}"] = value
        for i in range(len(self.sensory_layers) - 1, -1, -1):
            dx = self._backprop_dense(f"sensory.dense{i}", inputs[i], dx, grads)

    def _trunk_relu(self, cache: Any) -> list[tuple[DenseLayer, np.ndarray]]:
        return list(zip(self.sensory_layers, cache[0]))


# ─────────────────────────────────────────────
# Concrete architectures
# ─────────────────────────────────────────────

class SensoryEncoder(FeedForwardNetwork):
    """Predicts ŝ_{t+1} from s_t alone."""

    kind = ArchitectureKind.S


class SensorimotorEncoder(FeedForwardNetwork):
    """Predicts ŝ_{t+1} from (s_t, m_t)."""

    kind = ArchitectureKind.SM
    uses_motor = True


class RecurrentSensoryEncoder(RecurrentNetwork):
    kind = ArchitectureKind.RECURRENT_S


class RecurrentSensorimotorEncoder(RecurrentNetwork):
    """Predicts ŝ_{t+1} from the sensory history and m_t."""

    kind = ArchitectureKind.RECURRENT_SM
    uses_motor = True
