"""
Exception hierarchy shared by all modules
"""
from typing import Optional


class NodalCurveError(Exception):
    """Base class for every error raised by the toolkit"""


class CurveError(NodalCurveError):
    """Invalid curve, subcurve or point"""


class CurveFormatError(CurveError):
    """Syntax or validation error in a curve file"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class StructureError(NodalCurveError):
    """Bad tail, spine or splitting-node choice"""


class SheafError(NodalCurveError):
    """Ill-formed combinatorial sheaf or unsupported sheaf operation"""


class StabilityError(NodalCurveError):
    """Inadmissible stability query"""


class AbelError(NodalCurveError):
    """Abel map or image-curve precondition violated"""


class SEquivalenceError(NodalCurveError):
    """S-equivalence query on an unstable sheaf"""
