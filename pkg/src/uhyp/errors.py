"""Exception hierarchy for the uhyp solver"""
from typing import Optional


class UhypError(Exception):
    """Base error; `detail` is the message shown to the user"""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ResolutionError(UhypError):
    """Grid spacing too coarse for a carrier frequency"""


class SingularFrequencyError(UhypError):
    """A nonzero λ was required but λ = 0 was given"""


class IllPreparedDataError(UhypError):
    """λ=0 plane carries more energy than the reject policy allows"""

    def __init__(self, fraction: float, threshold: float):
        super().__init__(
            f"λ=0 plane energy fraction {fraction:.3e} exceeds threshold {threshold:.3e}"
        )
        self.fraction = fraction
        self.threshold = threshold


class UndefinedRatioError(UhypError):
    pass


class OutOfBandError(UhypError):
    """Interpolation requested outside the frequency grid"""


class UnsupportedDimensionError(UhypError):
    pass


class TrajectoryError(UhypError):
    pass


class ConfigError(UhypError):
    """Run-config parse or validation failure, with the 1-based line"""

    def __init__(self, detail: str, line: Optional[int] = None):
        message = f"line {line}: {detail}" if line is not None else detail
        super().__init__(message)
        self.line = line


class SnapshotFormatError(UhypError):
    pass
