"""Exception hierarchy shared by every grg module."""


class GrgError(Exception):
    """Base class for all errors raised by grg."""


class ParseError(GrgError):
    """Malformed input text. ``line`` is 1-based, or None when unknown."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(GrgError):
    """A structurally invalid arena or game."""


class WrongClass(GrgError):
    """A specialised solver was called on an instance outside its class."""


class TooManyTargets(GrgError):
    """The number of targets exceeds the supported mask width."""


class MemoryBudget(GrgError):
    """A product construction would exceed the configured memory budget."""


class NoWitness(GrgError):
    """A witness was requested for an instance that has none."""


class BudgetExceeded(GrgError):
    """An oracle was asked to solve an instance beyond its budget."""


class TooManyVariables(GrgError):
    """A formula has too many variables for exhaustive evaluation."""


class TooLarge(GrgError):
    """A graph is too large for exhaustive enumeration."""


class PartialStrategy(GrgError):
    """A strategy is undefined on a reachable state owned by its player."""


class EmptyGraph(GrgError):
    """A reduction needs at least one edge."""


class InfeasibleParams(GrgError):
    """Random generator parameters that cannot be satisfied."""
