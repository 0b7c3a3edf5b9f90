"""Exception hierarchy shared by all polyslot modules."""


class PolyslotError(Exception):
    """Base class for every error raised by this package."""


class TypeMismatch(PolyslotError):
    """Wire types of two morphisms do not line up for the requested operation."""


class DimensionMismatch(PolyslotError):
    """Two factors that must share a dimension do not."""


class BadPermutation(PolyslotError):
    """A factor permutation does not match the factor count it is applied to."""


class NotUnitary(PolyslotError):
    """An operation restricted to the unitary groupoid received a non-unitary."""


class ConstraintFails(PolyslotError):
    """A no-pathing precondition does not hold for the given morphism."""


class ExtractionUnstable(PolyslotError):
    """Witness extraction produced a reassembly residual above tolerance."""

    def __init__(self, residual: float):
        super().__init__(f"reassembly residual {residual:.3e} above tolerance")
        self.residual = residual


class PathViolation(PolyslotError):
    """Contracting the requested wires would create a time-loop."""


class NotClosed(PolyslotError):
    """A contraction left the ambient category (result not unitary)."""


class NotAComb(PolyslotError):
    """A claimed single-slot supermap fails the no-pathing test on the swap probe."""


class ReassemblyFail(PolyslotError):
    """Recovered comb does not reproduce the supermap's action within tolerance."""

    def __init__(self, residual: float):
        super().__init__(f"comb action residual {residual:.3e} above tolerance")
        self.residual = residual


class InconsistentBackend(PolyslotError):
    """Per-party comb evaluations of an srep supermap disagree."""


class CompositionError(PolyslotError):
    """Base class for polycategory composition errors."""


class SelfComposition(CompositionError):
    """A term cannot be composed directly with itself."""


class AlreadyConnected(CompositionError):
    """A second wire between the same two terms would form a time-loop."""


# The loop guard is referred to by either name in demos and reports.
MultiWireLoop = AlreadyConnected


class BadControl(PolyslotError):
    """Control projectors are not orthogonal or not complete."""


class BadOrderings(PolyslotError):
    """Switch orderings do not match the control projector count."""


class DigestMismatch(PolyslotError):
    """A regenerated fixture does not match its committed digest."""
