"""
Exception hierarchy for the UC-CET solver

Each class carries the CLI exit code it maps to.
"""


class UCCETError(Exception):
    """Base class for all solver errors."""

    exit_code = 1


class InstanceValidationError(UCCETError, ValueError):
    """Raw instance data violates a documented invariant."""

    def __init__(self, field: str, message: str, unit: int = None):
        self.field = field
        self.unit = unit
        where = f"unit {unit}, field '{field}'" if unit is not None else f"field '{field}'"
        super().__init__(f"{where}: {message}")


class InstanceInfeasibleError(UCCETError):
    """The linear constraint system X_L has no point."""

    exit_code = 2


class EmptyCenterProblemError(InstanceInfeasibleError):
    """The integer ellipsoid center problem has no point."""

    def __init__(self, message: str, objective_cut: bool):
        self.objective_cut = objective_cut
        super().__init__(message)


class NoInteriorPointError(UCCETError):
    """The center-point problem found no strictly feasible emission point."""

    exit_code = 2

    def __init__(self, g_value: float):
        self.g_value = g_value
        super().__init__(f"no interior point of the emission constraint: min g = {g_value:.6g} >= 0")


class LineSearchError(UCCETError, ValueError):
    """Line-search endpoints do not bracket the boundary of g."""

    def __init__(self, endpoint: str, g_value: float):
        self.endpoint = endpoint
        self.g_value = g_value
        expected = "< 0" if endpoint == "interior" else "> 0"
        super().__init__(f"{endpoint} endpoint has g = {g_value:.6g}, expected {expected}")


class BackendError(UCCETError):
    """A solver backend returned an error status."""

    exit_code = 3


class UnsupportedProblemError(BackendError):
    """The problem class is outside the backend's capabilities."""


class SolutionFileError(BackendError):
    """A solver solution file could not be parsed."""

    def __init__(self, path, line_no: int, line: str, reason: str):
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {reason}: {line.strip()!r}")


class OracleLimitError(UCCETError):
    """Instance too large for brute-force enumeration."""
