"""Exception hierarchy shared by all rankone modules."""


class RankOneError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(RankOneError, ZeroDivisionError):
    pass


class DimensionMismatch(RankOneError, ValueError):
    pass


class FieldMismatch(RankOneError, ValueError):
    pass


class Singular(RankOneError, ValueError):
    pass


class CharTwo(RankOneError, ValueError):
    """Raised where an operation needs 2 to be invertible."""


class InfiniteField(RankOneError, ValueError):
    pass


class ZeroInput(RankOneError, ValueError):
    pass


class NotNormalized(RankOneError, ValueError):
    pass


class NotIdempotent(RankOneError, ValueError):
    pass


class DomainGap(RankOneError, KeyError):
    """A symmetry map was queried outside the idempotents it knows about."""

    def __init__(self, idempotent):
        super().__init__(idempotent)
        self.idempotent = idempotent

    def __str__(self):
        return f"map undefined on {self.idempotent!r}"


class NotAPreserver(RankOneError):
    """The input map is not of conjugation or transpose-conjugation form."""


class DependentBasis(NotAPreserver):
    """The primed basis is linearly dependent, so the map cannot preserve traces."""


class NotInnerForm(NotAPreserver):
    pass


class SingularCandidate(NotInnerForm):
    """The assembled conjugation candidate is not invertible."""


class NoSquareRoot(NotAPreserver):
    pass


class NotOrthogonalForm(NotAPreserver):
    pass


class NotASymmetry(RankOneError):
    pass


class AmbiguousPhase(NotASymmetry):
    pass


class BudgetExceeded(RankOneError):
    """Search stopped at the node cap; ``checkpoint`` allows resuming."""

    def __init__(self, nodes, found, checkpoint):
        super().__init__(f"node budget exhausted after {nodes} nodes ({found} maps so far)")
        self.nodes = nodes
        self.found = found
        self.checkpoint = checkpoint
