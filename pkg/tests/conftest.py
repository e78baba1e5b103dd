from __future__ import annotations

import numpy as np
import pytest

from smrep.dataset.trajectory import Trajectory, generate
from smrep.models.contracts import ArchitectureKind, ArchitectureSpec
from smrep.sim.environment import make_environment


def tiny_spec(kind: ArchitectureKind | str, horizon: int = 6) -> ArchitectureSpec:
    """Same topology as the canonical architectures, narrow enough for finite differences."""
    kind = ArchitectureKind(kind)
    if kind.recurrent:
        return ArchitectureSpec(
            kind=kind,
            encoder_hidden=(4,),
            lstm_layers=2,
            lstm_units=3,
            sensory_dims=3,
            motor_dims=2,
            predictor_hidden=6,
            horizon=horizon,
        )
    return ArchitectureSpec(
        kind=kind, encoder_hidden=(4, 5), sensory_dims=3, motor_dims=2, predictor_hidden=6, horizon=horizon
    )


@pytest.fixture(scope="session")
def square():
    return make_environment("square")


@pytest.fixture(scope="session")
def rooms1():
    return make_environment("rooms1")


@pytest.fixture(scope="session")
def rooms2():
    return make_environment("rooms2")


@pytest.fixture(scope="session")
def square_traj(square) -> Trajectory:
    return generate(square, 600, seed=7)


@pytest.fixture(scope="session")
def rooms1_traj(rooms1) -> Trajectory:
    return generate(rooms1, 400, seed=3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(params=list(ArchitectureKind), ids=lambda k: k.value)
def kind(request) -> ArchitectureKind:
    return request.param
