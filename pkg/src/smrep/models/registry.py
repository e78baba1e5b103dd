"""
smrep/models/registry.py
────────────────────────
ArchitectureRegistry maps ArchitectureKind → SensorimotorNetwork subclass.

To add a new architecture:
  1. Add a value to models/contracts.py  ArchitectureKind enum
  2. Create a class in models/builtin.py (or a new file)
  3. Call  registry.register(ArchitectureKind.YOUR_KIND, YourClass)  below
"""
from __future__ import annotations

from typing import Optional, Type

from smrep.models.base import SensorimotorNetwork
from smrep.models.builtin import (
    RecurrentSensorimotorEncoder,
    RecurrentSensoryEncoder,
    SensorimotorEncoder,
    SensoryEncoder,
)
from smrep.models.contracts import ArchitectureKind, ArchitectureSpec
from smrep.nn.parameters import Parameters
from smrep.utils.exceptions import ConfigError


class ArchitectureRegistry:
    """Singleton registry; import the module-level `registry` instance."""

    def __init__(self) -> None:
        self._map: dict[ArchitectureKind, Type[SensorimotorNetwork]] = {}

    def register(self, kind: ArchitectureKind, cls: Type[SensorimotorNetwork]) -> None:
        self._map[kind] = cls

    def create(
        self,
        spec: ArchitectureSpec | ArchitectureKind | str,
        params: Optional[Parameters] = None,
        seed: int = 0,
        dtype: Optional[str] = None,
    ) -> SensorimotorNetwork:
        """
        Instantiate a network from its spec (or the canonical spec of a kind).
        Raises ConfigError if the kind is not registered.
        """
        if not isinstance(spec, ArchitectureSpec):
            try:
                spec = ArchitectureSpec.for_kind(spec)
            except ValueError as exc:
                raise ConfigError(
                    f"unknown architecture '{spec}'. Registered kinds: {self.registered_kinds()}"
                ) from exc
        cls = self._map.get(spec.kind)
        if cls is None:
            raise ConfigError(
                f"No architecture registered for kind '{spec.kind.value}'. "
                f"Registered kinds: {self.registered_kinds()}"
            )
        return cls(spec, params=params, seed=seed, dtype=dtype)

    def registered_kinds(self) -> list[str]:
        return [k.value for k in self._map]


# ── Module-level singleton ─────────────────────────────────────────────────

registry = ArchitectureRegistry()

registry.register(ArchitectureKind.S,            SensoryEncoder)
registry.register(ArchitectureKind.SM,           SensorimotorEncoder)
registry.register(ArchitectureKind.RECURRENT_S,  RecurrentSensoryEncoder)
registry.register(ArchitectureKind.RECURRENT_SM, RecurrentSensorimotorEncoder)
