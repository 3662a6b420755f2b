"""Exception types shared across the package."""


class JetvarError(Exception):
    """Base class for all errors raised by jetvar."""


class UnknownCoordinate(JetvarError):
    """A coordinate is not declared in the ambient jet context."""


class UnboundCoordinate(JetvarError):
    """Numeric evaluation hit a coordinate with no binding."""


class OrderOverflow(JetvarError):
    """An operation would generate a jet coordinate beyond the hard ceiling."""


class NonPolynomialParameter(JetvarError):
    """The homotopy parameter occurs inside a function or a denominator."""


class NonPolynomialDivision(JetvarError):
    """Division by a non-invertible expression (a sum of terms)."""


class ContextMismatch(JetvarError):
    """Two objects live over incompatible jet contexts."""


class SingularBaseMap(JetvarError):
    """The base matrix of a fibered isomorphism is not invertible."""


class DegreeMismatch(JetvarError):
    """A differential form does not have the degree an operation requires."""


class DimensionMismatch(JetvarError):
    """Matrix or vector dimensions do not match the context."""


class NotODEContext(JetvarError):
    """An operation restricted to single-base-variable, order <= 2 data."""


class ProbeBoundaryError(JetvarError):
    """A variation direction fails to vanish at the domain endpoints."""


class ProblemFileError(JetvarError):
    """A problem file is malformed or inconsistent."""


class DslError(JetvarError):
    """Base class for expression-language errors; carries a source span."""

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.span = span


class DslSyntaxError(DslError):
    """The input string does not match the expression grammar."""


class UnknownIdentifier(DslError):
    """An identifier does not name a declared coordinate or function."""


class OrderExceeded(DslError):
    """A jet index is longer than the declared order of the context."""


class OrderZeroWarning(UserWarning):
    """A Lagrangian of order zero is its own Poincare-Cartan form."""
