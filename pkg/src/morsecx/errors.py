"""Exception hierarchy.

Every error raised by the library derives from :class:`MorseError` so callers
(and the CLI) can catch the whole family at once.
"""

from __future__ import annotations


class MorseError(Exception):
    """Base class for all library errors."""


# poset construction / lookup


class CycleInCovers(MorseError):
    pass


class NotGraded(MorseError):
    pass


class DanglingGlue(MorseError):
    pass


class UnknownElement(MorseError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return Exception.__str__(self)


class NoConsistentSigns(MorseError):
    pass


# matchings


class NotACover(MorseError):
    pass


class Overlap(MorseError):
    pass


class BudgetExceeded(MorseError):
    """A descent or flow computation exceeded its step budget.

    For a matching that is not rayless this is the expected outcome: some
    element starts an infinite descending path.
    """


class NotAcyclic(MorseError):
    pass


class NotRayless(MorseError):
    pass


class InfiniteCriticalSet(MorseError):
    pass


# rays


class InvalidRay(MorseError):
    pass


class HasBypass(MorseError):
    pass


class NotNormalized(MorseError):
    pass


class AcyclicityLost(MorseError):
    pass


class MultirayPresent(MorseError):
    """A multiray exists, hence uncountably many (2^aleph_0) ray classes."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class InfinitelyManyClasses(MorseError):
    pass


# algebra


class NotAComplex(MorseError):
    pass


class SideConditionViolated(MorseError):
    pass


# front end


class ParseError(MorseError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class UnknownExample(MorseError):
    pass
