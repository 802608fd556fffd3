"""Exception types shared across the toolkit."""


class GameError(Exception):
    """Base class for all toolkit errors."""


class InvalidGame(GameError):
    """Payoff data is malformed (ragged, non-finite, empty)."""


class InvalidStrategy(GameError):
    """A mixed strategy or multiset violates its invariants."""


class DimensionMismatch(GameError):
    """Strategy length or player side does not match the game."""


class SolverCapExceeded(GameError):
    """Game too large for the exact solver; use the iterative one."""


class SolverNotConverged(GameError):
    """Iterative solve ended with a duality gap above the request."""


class MalformedCertificate(GameError):
    """Certificate indices or fields are structurally invalid."""


class ConstructionFailed(GameError):
    """A verify-and-retry construction exhausted every fallback."""


class ValueBelowThreshold(GameError):
    """Correctness game value too low for an anti-checker to exist.

    Raised when some program in the family is accurate enough that no
    input distribution makes every program err on near-half the mass.
    """

    def __init__(self, message: str, value: float):
        super().__init__(message)
        self.value = value


class NoHittingSet(GameError):
    """A program never exceeds the step budget, so no input set works."""

    def __init__(self, message: str, program: str):
        super().__init__(message)
        self.program = program


class UncoverableColumn(GameError):
    """Greedy cover found an opponent strategy no candidate handles."""


class UnverifiedAntiChecker(GameError):
    """Refusing to sample from an anti-checker that failed verification."""


class OracleBudgetExceeded(GameError):
    """Materializing a payoff oracle would exceed the evaluation budget."""
