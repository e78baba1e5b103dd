"""Exception hierarchy.  Every error raised on purpose by smrep derives from SmrepError."""


class SmrepError(Exception):
    """Base class for all smrep errors."""


class EnvironmentLayoutError(SmrepError):
    """Unknown layout, wall outside the arena, or disconnected free space."""


class SimulationError(SmrepError):
    """The simulator reached an impossible state (e.g. a ray cast from inside a wall)."""


class DatasetError(SmrepError):
    pass


class TrajectoryFormatError(DatasetError):
    """A trajectory file is malformed or written by an incompatible format version."""


class ShapeError(SmrepError):
    pass


class CheckpointError(SmrepError):
    pass


class TrainingError(SmrepError):
    pass


class AnalysisError(SmrepError):
    pass


class ConfigError(SmrepError):
    """Invalid run configuration.  The message names the offending field."""
