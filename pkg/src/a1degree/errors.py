"""Exception hierarchy.

Errors are split into usage errors (bad input, unsupported field, parse
problems) and mathematical errors (a hypothesis of an operation fails on
valid input).  The CLI maps the former to exit code 1; a verification that
comes back False exits 2 and is not an exception at all.
"""


class A1Error(Exception):
    """Base class for all errors raised by this package."""


class UsageError(A1Error):
    """Malformed input: parse errors, wrong arity, unsupported fields."""


class MathError(A1Error):
    """Valid input that violates a mathematical precondition."""


# -- parsing / construction ------------------------------------------------

class ParseError(UsageError):
    def __init__(self, message, text, position):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


class UnknownVariable(ParseError):
    pass


class CoefficientNotInField(UsageError):
    pass


class UnsupportedCharacteristic(UsageError):
    """Characteristic 2 is rejected everywhere."""


class ReducibleMinimalPolynomial(UsageError):
    pass


class InseparableMinimalPolynomial(UsageError):
    pass


class ArityMismatch(UsageError):
    pass


class NonSquareSystem(UsageError):
    pass


class FieldMismatch(UsageError):
    pass


class NotAnExtension(UsageError):
    pass


class InfiniteField(UsageError):
    pass


# -- field arithmetic ------------------------------------------------------

class ZeroInput(MathError):
    pass


class ZeroDivision(MathError):
    pass


class PrecisionExhausted(MathError):
    """A truncated series did not retain enough terms to decide the question."""


class NonUnitLeadingTerm(MathError):
    pass


class LeadingCoeffNotSquare(MathError):
    """sqrt needs a square leading coefficient; reports the extension to adjoin."""

    def __init__(self, message, needed_minimal_polynomial=None):
        super().__init__(message)
        self.needed_minimal_polynomial = needed_minimal_polynomial


# -- bilinear forms / GW ---------------------------------------------------

class DegenerateForm(MathError):
    pass


# -- local algebras / degrees ----------------------------------------------

class NotAZero(MathError):
    pass


class NotIsolated(MathError):
    pass


class CharDividesDimension(MathError):
    pass


class JacobianVanishesInAlgebra(MathError):
    pass


class DegenerateZero(MathError):
    """Jacobian vanishes at the zero; the simple-zero formula does not apply."""


class DegenerateEkl(MathError):
    """The EKL Gram matrix came out degenerate.  This contradicts
    well-definedness of the form, so it signals an internal bug."""


class InseparableResidueField(MathError):
    pass


class NotCoprime(MathError):
    pass


class DegreeOrder(MathError):
    pass


class IrregularValue(MathError):
    pass


class FiberEscapesBound(MathError):
    pass


# -- singularities ---------------------------------------------------------

class SmoothPoint(MathError):
    pass


class NotANode(MathError):
    pass


# -- branches --------------------------------------------------------------

class SeedInconsistent(MathError):
    pass


class NoQuadraticConvergence(MathError):
    pass


class NonUnitHessian(MathError):
    pass


class BranchDoesNotSpecialize(MathError):
    pass


class IncompleteBranchSet(MathError):
    pass
