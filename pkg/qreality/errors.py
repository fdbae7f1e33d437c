"""
Exception hierarchy for qreality.

Every error carries the process exit code the command line reports for it.
"""


class QRealityError(Exception):
    """Base class for all qreality errors."""
    exit_code = 1


class InputError(QRealityError, ValueError):
    """Malformed or inconsistent user input."""
    exit_code = 2


class ParseError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class MalformedFile(InputError):
    pass


class ReportFormatError(InputError):
    pass


class DensityError(InputError):
    pass


class NegativeDensity(DensityError):
    pass


class MeasureError(InputError):
    pass


class NonzeroEmpty(MeasureError):
    def __init__(self, value):
        super().__init__(f"mu(empty set) must be 0, got {value}")
        self.value = value


class NegativeValue(MeasureError):
    def __init__(self, event, value):
        super().__init__(f"mu({event}) = {value} is negative")
        self.event = event
        self.value = value


class NotGrade2Additive(MeasureError):
    def __init__(self, triple, message=None):
        super().__init__(message or f"grade-2 additivity fails on disjoint triple {triple}")
        self.triple = triple


class NegativeExtension(MeasureError):
    def __init__(self, event, value):
        super().__init__(f"extension from pairs gives mu({event}) = {value} < 0")
        self.event = event
        self.value = value


class InvalidDirac(MeasureError):
    pass


class ResourceGuardError(QRealityError):
    """Search or enumeration stopped before exceeding its budget."""
    exit_code = 4


class EnumerationTooLarge(ResourceGuardError):
    pass


class SolverError(QRealityError):
    """An LP witness failed exact re-substitution."""
    exit_code = 1
