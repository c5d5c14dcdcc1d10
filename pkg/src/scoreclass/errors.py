"""Exception types shared across the package."""


class ScoreClassError(Exception):
    """Base class for every error raised by this package."""


class OutOfRangeError(ScoreClassError):
    """A score lies outside the instance's achievable range."""


class ParameterError(ScoreClassError):
    """An argument violates a documented precondition."""


class UnsupportedModeError(ScoreClassError):
    """The operation does not apply to this instance (weights, costs, cutoff shape)."""


class ResourceLimitError(ScoreClassError):
    """An exact computation would exceed its configured size guard."""


class InternalDefectError(ScoreClassError):
    """An internal invariant failed; this is a bug, not a caller mistake."""
