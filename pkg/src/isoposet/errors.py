"""Exception hierarchy shared by all isoposet modules."""


class IsoposetError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(IsoposetError):
    """Operands live on Hilbert spaces of different dimensions."""


class NotAPartialIsometry(IsoposetError):
    """The triple-product residual ||V V* V - V|| exceeds the tolerance."""


class IncomparablePair(IsoposetError):
    """Two family members are not comparable in the Halmos-McLaughlin order.

    Carries the indices of the offending pair in the original input order.
    """

    def __init__(self, first: int, second: int, message: str | None = None):
        self.first = first
        self.second = second
        super().__init__(
            message or f"elements {first} and {second} are not HM-comparable"
        )


class NotTotallyOrdered(IsoposetError):
    """A family required to be totally ordered is not."""


class NoUpperBoundProvided(IsoposetError):
    """Supremum of a non-chain family needs an explicit upper bound."""


class NotAnUpperBound(IsoposetError):
    """The supplied bound does not dominate every family member."""


class PreconditionViolated(IsoposetError):
    """The operation's mathematical precondition does not hold."""


class NotAMember(IsoposetError):
    """The operator does not preserve every chain element."""


class DecompositionFailed(IsoposetError):
    """A defensive check failed while splitting off rank-one terms."""


class NonConvergence(IsoposetError):
    """An iterative scheme hit its cap before reaching its residual target."""


class Infeasible(IsoposetError):
    """The interpolation constant is infinite; no bounded solution exists."""


class BadZeroRequest(IsoposetError):
    """A row/column was requested zero although its datum is nonzero."""


class HypothesisViolated(IsoposetError):
    """The interpolation data lie outside the solvable configuration."""


class ParseError(IsoposetError):
    """A matrix file does not conform to the JSON schema."""


class UnknownCommand(IsoposetError):
    """CLI dispatch received a command name it does not know."""
