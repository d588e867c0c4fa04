"""Exception hierarchy for qtrace."""


class QTraceError(Exception):
    """Base class for all qtrace errors."""


class NonHermitianInput(QTraceError, ValueError):
    pass


class ConvergenceFailure(QTraceError, RuntimeError):
    pass


class DomainError(QTraceError, ValueError):
    """A value lies outside the domain of a deformed function or functional."""


class InvalidSpec(QTraceError, ValueError):
    pass


class NotADensityMatrix(DomainError):
    pass


class NotNegativeDefinite(DomainError):
    pass


class SignConstraintViolated(DomainError):
    pass


class NonRealTrace(QTraceError, ArithmeticError):
    """Trace of a product of Hermitian matrices came out with a large imaginary part."""


class DidNotConverge(QTraceError, RuntimeError):
    pass


class UnknownSuite(QTraceError, ValueError):
    pass


class ConfigParseError(QTraceError, ValueError):
    pass


class ParseError(QTraceError, ValueError):
    pass
