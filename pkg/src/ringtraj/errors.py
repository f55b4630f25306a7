"""Exception hierarchy shared by the library and the CLI."""


class RingTrajError(Exception):
    """Base class for all errors raised by ringtraj."""


class InvalidInputError(RingTrajError, ValueError):
    """Malformed or out-of-range input data (files, configs, parameters)."""


class EmptySliceError(RingTrajError):
    """A ring slice has no occupied pixels, so no contour can be traced."""


class InfeasibleTrajectoryError(RingTrajError):
    """Trajectory exceeds vehicle limits and period adjustment is disabled."""


class SimulationDivergedError(RingTrajError):
    """The follower state became non-finite."""
