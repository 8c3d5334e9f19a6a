"""Exception hierarchy shared by all amok modules."""


class AmokError(Exception):
    """Base class for all errors raised by this package."""


# --- numerical kernel ---

class NotHermitian(AmokError):
    pass


class NotUnitary(AmokError):
    pass


class NoConvergence(AmokError):
    pass


class DomainError(AmokError):
    """Scalar function undefined at a (clipped) eigenvalue."""


# --- model / element level ---

class ShapeMismatch(AmokError):
    pass


class AlgebraMismatch(AmokError):
    pass


class LevelMismatch(AmokError):
    pass


class ZeroOperand(AmokError):
    """Norm-orthogonality is only defined for nonzero positive operands."""


# --- equivalence engine ---

class NotProjection(AmokError):
    pass


class NotPartialUnitary(AmokError):
    pass


class Unsupported(AmokError):
    """Input falls outside the fragment this model can decide."""


class SourceMismatch(AmokError):
    pass


class PredicateFailure(AmokError):
    """A derived sample failed its domain predicate.

    Carries the index of the offending sample when applicable.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PreconditionFailure(AmokError):
    """A named precondition clause was violated."""


# --- groups / morphisms ---

class NotCancellative(AmokError):
    pass


class NotUnital(AmokError):
    pass


# --- CLI / parsing ---

class SpecParseError(AmokError):
    pass
