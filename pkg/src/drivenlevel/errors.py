"""Shared exception types.

Numerical failures are kept distinct from configuration problems so callers
(and the CLI exit-code mapping) can tell them apart.
"""


class DrivenLevelError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DrivenLevelError):
    """Invalid or inconsistent run configuration."""


class QuadratureFailure(DrivenLevelError):
    """An adaptive integral failed to reach the requested tolerance."""


class TooCloseToBandEdge(DrivenLevelError):
    """Requested evaluation point sits inside the band-edge exclusion floor."""


class StepTooLarge(DrivenLevelError):
    """Time step violates a solver precondition or failed step-halving check."""


class KernelCoverage(DrivenLevelError):
    """Cached kernel lag grid does not cover the requested time span."""


class WindowOutOfRange(DrivenLevelError):
    """Analysis window does not fit inside the trace."""


class GridMismatch(DrivenLevelError):
    """Two traces were expected on the same time grid but differ."""
