"""
Error types raised by the screening toolkit
"""

from typing import Any, Optional


class ScreeningError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 4

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class IntegralParseError(ScreeningError):
    """Malformed line in an integral file"""

    def __init__(self, message: str, line_no: Optional[int] = None, path: Optional[str] = None):
        self.line_no = line_no
        self.path = path
        location = f"{path}:{line_no}: " if path and line_no else (f"line {line_no}: " if line_no else "")
        super().__init__(f"{location}{message}")

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["line"] = self.line_no
        return data


class IntegralFormatError(ScreeningError):
    """Missing or inconsistent header information"""


class ValidationError(ScreeningError):
    """Input violates a symmetry or structural invariant"""


class DomainError(ScreeningError):
    """Argument outside the mathematical domain of an operation"""


class SynthesisError(ScreeningError):
    """No filter polynomial meets the certificate within the degree cap"""


class CapacityError(ScreeningError):
    """Dense or grid dimension beyond the configured cap"""


class PropagationError(ScreeningError):
    """Wavepacket propagation lost normalization"""


class FactorizationIncompleteError(ScreeningError):
    """Rank ladder exhausted before the reconstruction threshold was met"""

    exit_code = 1

    def __init__(self, message: str, best: Any = None, achieved_error: float = float("nan")):
        self.best = best
        self.achieved_error = achieved_error
        super().__init__(message)

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["achieved_error"] = self.achieved_error
        return data
