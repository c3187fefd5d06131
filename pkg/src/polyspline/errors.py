"""Exception taxonomy shared by every module."""


class PolysplineError(Exception):
    """Base class for all library errors."""


class DimensionError(PolysplineError, ValueError):
    pass


class SingularMatrixError(PolysplineError, ArithmeticError):
    pass


class RankError(PolysplineError, ValueError):
    pass


class DomainError(PolysplineError, ValueError):
    pass


class CertificateError(PolysplineError, ValueError):
    """A supplied vector does not keep every denominator nonzero."""


class UnboundedError(PolysplineError, ValueError):
    pass


class InfeasibleError(PolysplineError, ValueError):
    pass


class DegeneracyError(PolysplineError, ValueError):
    pass


class SizeError(PolysplineError, ValueError):
    pass


class SamplingExhaustedError(PolysplineError, RuntimeError):
    pass


class ParseError(PolysplineError, ValueError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
