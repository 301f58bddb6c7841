"""Exception types shared across the package."""


class QdbError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(QdbError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class NonHermitianInput(QdbError, ValueError):
    """A Hermitian matrix was required but not supplied."""


class NotPositiveSemidefinite(QdbError, ValueError):
    """Eigenvalues fall below the allowed negative tolerance."""


class NotInvertible(QdbError, ValueError):
    """A matrix power with negative exponent hit a (near-)zero eigenvalue."""


class NonInvertibleState(QdbError, ValueError):
    """The state rho has eigenvalues at or below the rank cutoff."""


class NonInvertibleSigma(QdbError, ValueError):
    """The output state sigma has eigenvalues at or below the rank cutoff."""


class EtdbNotSatisfied(QdbError, ValueError):
    """A balanced decomposition was requested for an unbalanced channel."""


class ThetaStateMismatch(QdbError, ValueError):
    """The reversing operation does not fix the supplied state."""


class NotDiagonalizedJointly(QdbError, ValueError):
    """The supplied basis does not bring the involution to real diagonal form."""


class ZeroSigmaComponent(QdbError, ValueError):
    """The pushed-forward classical distribution has a zero entry."""


class NonInvolutive(QdbError, ValueError):
    """An operator or permutation that must square to the identity does not."""


class EigensolverError(QdbError, ArithmeticError):
    """The Jacobi iteration failed to reach its off-diagonal target."""


class ConsistencyError(QdbError, ArithmeticError):
    """Two independently coded evaluation routes disagreed beyond tolerance."""


class InputError(QdbError, ValueError):
    """Malformed JSON input or schema violation."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line} column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


#: Errors that mean "the check cannot be evaluated on this input", as opposed
#: to a failing verdict or malformed input.
NOT_EVALUABLE = (
    NonInvertibleState,
    NonInvertibleSigma,
    ZeroSigmaComponent,
    ThetaStateMismatch,
    NotDiagonalizedJointly,
    EtdbNotSatisfied,
)
