"""Exception hierarchy shared across the package."""


class TrivalueError(Exception):
    """Base class for all package errors."""


class ConfigError(TrivalueError):
    """A run configuration file is missing, malformed, or inconsistent."""


class DegenerateDensityError(TrivalueError):
    """A gridded density has (numerically) zero total mass."""


class DegenerateStageError(TrivalueError):
    """A stage's success probability is too close to zero for
    conditional statistics to be meaningful."""


class NumericalIntegrityError(TrivalueError):
    """Two redundant computation paths disagree beyond tolerance,
    indicating a grid misconfiguration rather than a user error."""
