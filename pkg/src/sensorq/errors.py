"""Exception types raised across the package."""


class SensorqError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(SensorqError, ValueError):
    """A physical parameter is out of its valid range."""


class InvalidChannelError(SensorqError, ValueError):
    """A sensor channel specification is malformed or out of range."""


class SimulationDivergedError(SensorqError, RuntimeError):
    """The discretized state recursion produced non-finite values."""


class GenerationFailedError(SensorqError, RuntimeError):
    """Ground-motion synthesis produced an unusable (all-zero) record."""


class InvalidFisherError(SensorqError, ValueError):
    """A Fisher information matrix is not positive semidefinite."""


class InvalidActionError(SensorqError, ValueError):
    """An action index is out of range or targets an occupied channel."""


class TerminalStateError(SensorqError, RuntimeError):
    """An episode operation was applied to a terminal state."""


class TrainingDivergedError(SensorqError, RuntimeError):
    """Q-network training produced a non-finite loss.

    Carries the per-episode history collected before divergence so callers
    can persist partial artifacts.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history if history is not None else []


class ConfigError(SensorqError, ValueError):
    """A run configuration file is unreadable or semantically invalid."""
