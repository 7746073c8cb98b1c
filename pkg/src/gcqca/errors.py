"""Exception types shared across the package."""


class GcqcaError(Exception):
    """Base class for all package errors."""


class InvalidArraySize(GcqcaError):
    pass


class DimensionError(GcqcaError):
    pass


class NormalizationError(GcqcaError):
    pass


class NonUnitaryGate(GcqcaError):
    pass


class MissingParameter(GcqcaError):
    pass


class ParseError(GcqcaError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParityError(GcqcaError):
    pass


class LayoutInvalid(GcqcaError):
    pass


class MarginExceeded(GcqcaError):
    def __init__(self, message, instruction=None):
        super().__init__(message)
        self.instruction = instruction


class KernelUnavailable(GcqcaError):
    pass


class NonInvertibleInAlphabet(GcqcaError):
    pass


class KernelNotFound(GcqcaError):
    pass
