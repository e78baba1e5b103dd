"""2D lidar agent simulator."""

from smrep.sim.agent import (
    SENSOR_ANGLES,
    SENSOR_RANGE,
    MotorCommand,
    Pose,
    apply_motor,
    behavior_step,
    perceived_points,
    ray_cast,
    sense,
    step_agent,
)
from smrep.sim.environment import LAYOUTS, Environment, make_environment
from smrep.sim.geometry import wrap_angle

__all__ = [
    "LAYOUTS",
    "SENSOR_ANGLES",
    "SENSOR_RANGE",
    "Environment",
    "MotorCommand",
    "Pose",
    "apply_motor",
    "behavior_step",
    "make_environment",
    "perceived_points",
    "ray_cast",
    "sense",
    "step_agent",
    "wrap_angle",
]
