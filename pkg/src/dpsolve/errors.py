"""Exception hierarchy shared by all modules."""


class DpsolveError(Exception):
    """Base class for library errors."""


class DivisionByZeroPoly(DpsolveError, ZeroDivisionError):
    pass


class NotDivisible(DpsolveError, ArithmeticError):
    pass


class ZeroPolynomial(DpsolveError, ValueError):
    pass


class NotLinear(DpsolveError, ValueError):
    pass


class Inconsistent(DpsolveError):
    """A linear system has no solution."""


class Exhausted(DpsolveError):
    """A solve budget (case splits, S-polynomials or time) ran out."""


class DeadlineExceeded(Exhausted):
    pass


class DegenerateFieldPair(DpsolveError):
    """Delta = M0*N1 - M1*N0 vanishes identically."""


class DivergenceFreeField(DpsolveError):
    pass


class NoAssociatedField(DpsolveError):
    pass


class IncompleteSplit(DpsolveError):
    def __init__(self, message, found=None, residual=None):
        super().__init__(message)
        self.found = found or []
        self.residual = residual


class MethodFailed(DpsolveError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class NoAlgebraicIF(DpsolveError):
    pass


class NoDarbouxIF(DpsolveError):
    pass


class QuadratureNotClosed(DpsolveError):
    pass


class ParseError(DpsolveError, ValueError):
    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = tuple(expected)


class NonRational(ParseError):
    pass
