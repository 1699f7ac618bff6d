"""
Custom exceptions for the cantorspectra package.
"""

class CantorSpectraException(Exception):
    """Base exception for cantorspectra errors"""
    pass


class FieldError(CantorSpectraException):
    """Invalid number field, field mismatch, or illegal field arithmetic"""
    pass


class LatticeError(CantorSpectraException):
    """Dimension mismatch or containment failure between lattices"""
    pass


class TowerError(CantorSpectraException):
    """Malformed diagram spec, unreachable positivity, or bad level index"""
    pass


class MeasureError(CantorSpectraException):
    """Invariant measure cannot be computed exactly for this tower"""
    pass


class PreconditionError(CantorSpectraException):
    """An operation was called without the data it requires"""
    pass


class SpecFormatError(CantorSpectraException):
    """Unparseable DiagramSpec file, expression, or catalog name"""
    pass
