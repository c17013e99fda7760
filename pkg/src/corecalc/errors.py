"""Exception hierarchy with stable error codes.

Every user-facing failure mode maps to exactly one code; the CLI surfaces
these codes verbatim so scripts can dispatch on them.
"""


class CorecalcError(Exception):
    """Base class; `code` is the stable machine-readable identifier."""

    code = "E-INTERNAL"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class RingMismatchError(CorecalcError):
    code = "E-RING-MISMATCH"


class DimensionBoundError(CorecalcError):
    code = "E-DIM-BOUND"


class PreconditionError(CorecalcError):
    """An operation was called outside its documented preconditions."""

    code = "E-PRECONDITION"


class NotCofiniteError(CorecalcError):
    code = "E-NOT-COFINITE"


class NotNormalError(CorecalcError):
    code = "E-NOT-NORMAL"


class NotMonomialError(CorecalcError):
    code = "E-NOT-MONOMIAL"


class ReductionNotFoundError(CorecalcError):
    code = "E-REDUCTION-NOT-FOUND"


class IndependenceViolationError(CorecalcError):
    """Two independently sampled reductions produced different colon ideals."""

    code = "E-INDEPENDENCE"


class DefiningPropertyViolationError(CorecalcError):
    code = "E-DEFINING-PROPERTY"


class VerificationError(CorecalcError):
    """A cross-route consistency check failed (never ignored silently)."""

    code = "E-VERIFICATION"


class InternalError(CorecalcError):
    """Invariant violation inside the engine; always a bug, never user error."""

    code = "E-INTERNAL"


class ScriptError(CorecalcError):
    """Syntax error in a script, with 1-based position information."""

    code = "E-SYNTAX"

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"syntax error at line {line} col {col}, {message}")
        self.line = line
        self.col = col


class UnknownIdentifierError(CorecalcError):
    code = "E-UNKNOWN-IDENT"


class ArityError(CorecalcError):
    code = "E-ARITY"
