"""Exception hierarchy shared across the toolkit.

Mathematical failures carry witnesses; schema failures carry locations.
"""


class TorindError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(TorindError):
    """Malformed or out-of-contract input document."""


class AxiomViolation(TorindError):
    """A DG algebra/module axiom fails; carries the axiom name and a witness."""

    def __init__(self, axiom, witness=None):
        self.axiom = axiom
        self.witness = witness
        msg = f"axiom violated: {axiom}"
        if witness is not None:
            msg += f" (witness: {witness})"
        super().__init__(msg)


class NotLocal(TorindError):
    """Degree-0 part of the algebra is not spanned by the unit."""


class HomologyZero(TorindError):
    """H(A) = 0, violating the standing assumption A is not acyclic."""


class TruncationBelowHomology(TorindError):
    """Soft truncation below sup of homology would change homology."""


class DegreeMismatch(TorindError):
    """A differential/action entry is not homogeneous of the required degree."""


class NotSingleDegree(TorindError):
    """Semibasis is not concentrated in a single degree."""


class AlgebraMismatch(TorindError):
    """Operands live over different DG algebras."""


class ZeroModule(TorindError):
    """Operation requires a module with nonzero homology."""


class NonArtinian(TorindError):
    """Operation requires an artinian (finite-dimensional) ring."""


class BalanceMismatch(TorindError):
    """Internal bug trap: the two Tor computation routes disagree."""


class CutoffTooSmall(TorindError):
    """Requested truncation/syzygy degree is below sup of homology."""


class PerfectInput(TorindError):
    """A DG module certified perfect where a non-perfect one is required."""


class PreconditionUnverified(TorindError):
    """A theorem hypothesis failed its own verification; carries the witness."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class PowerNotZero(TorindError):
    """m_A^n is nonzero where the construction requires it to vanish."""


class DepthNonzero(TorindError):
    """Base-case pipeline requires a depth-0 ring."""


class DepthZero(TorindError):
    """Regular-element reduction requires positive depth."""


class NotRegularVariable(TorindError):
    """The chosen variable occurs in an ideal generator."""


class ReductionUnavailable(TorindError):
    """Positive depth but no variable is regular in this representation."""


class ResolutionCancelled(TorindError):
    """A progress callback requested cancellation."""
