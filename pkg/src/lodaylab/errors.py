"""Exception types shared across the library."""


class LodayLabError(Exception):
    """Base class for all library errors."""


class BaseMismatch(LodayLabError):
    """Operands live over different base rings."""


class FlavorMismatch(LodayLabError):
    """An (anti-)involution of the wrong flavor was supplied."""


class CompositionNonzero(LodayLabError):
    """d_out . d_in is not zero, so there is no homology to take."""


class NotInvolution(LodayLabError):
    """The supplied action does not square to the identity."""


class TwoNotInvertible(LodayLabError):
    """The requested construction needs 2 to be invertible in the base ring."""


class DimensionOverflow(LodayLabError):
    """A chain level would exceed the configured basis-element budget."""

    def __init__(self, needed, cap, where=""):
        self.needed = needed
        self.cap = cap
        super().__init__(
            f"level size {needed} exceeds cap {cap}" + (f" in {where}" if where else "")
        )


class TooLarge(LodayLabError):
    """An element-indexed construction was asked for an infeasibly large ring."""


class InfiniteLevel(LodayLabError):
    """An element-indexed construction needs a finite level and got an infinite one."""


class IncompatibleBimodule(LodayLabError):
    """Bimodule data is not compatible with the algebra's (anti-)involution."""


class HypothesisViolation(LodayLabError):
    """A theorem checker was run on an instance outside the theorem's hypotheses."""


class ValidationFailed(LodayLabError):
    """Construction from an axiom-violating input.  Carries the report."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations[:5]))
