"""smrep: sensorimotor prediction and representation analysis for a simulated lidar agent."""

__version__ = "0.1.0"
