"""Exception hierarchy shared by all sarfocus modules."""


class SarError(Exception):
    """Base class for every error raised by sarfocus."""

    exit_code = 1


class ConfigError(SarError, ValueError):
    """Invalid parameters, scenario fields or call configuration."""

    exit_code = 2

    def __init__(self, message, problems=None):
        self.problems = list(problems or [])
        if self.problems:
            message = message + "\n" + "\n".join(f"  - {p}" for p in self.problems)
        super().__init__(message)


class DomainError(SarError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 4


class GeometryError(DomainError):
    """Degenerate or unsupported acquisition geometry."""


class RangeAmbiguityError(DomainError):
    """A scatterer lies beyond the maximum unambiguous range."""


class UndefinedMetricError(DomainError):
    """Metric is undefined for the given input (e.g. an all-zero image)."""


class OptimizationError(SarError):
    """Autofocus optimisation could not proceed (non-finite objective)."""

    exit_code = 5


class FormatError(SarError):
    """Malformed or unsupported file contents."""

    exit_code = 3
