"""Exception types shared across the package."""


class TTessError(Exception):
    """Base class for domain errors raised by this package."""


class DegenerateConfiguration(TTessError):
    """Line set admits no usable time axis (collisions, coincident lines...)."""


class MalformedMarks(TTessError):
    """A birth/death mark references an event that is not on its line."""


class InvalidTessellation(TTessError):
    """An operation requiring a valid T-tessellation received something else."""


class BudgetExceeded(TTessError):
    """Enumeration walked past its node budget."""

    def __init__(self, message, lines=None):
        super().__init__(message)
        self.lines = lines


class InconsistentScheme(TTessError):
    """A murder-count labelling cannot have come from a real tessellation."""


class SchemeViolation(TTessError):
    """An orphan labelling scheme breaks one of its structural requirements."""


class InvalidReduction(TTessError):
    """Orphan refinement could not identify a removable orphan line."""


class NonTermination(TTessError):
    """Rebuild loop ran past its iteration cap; indicates an implementation fault."""


class StabilityViolation(TTessError):
    """An energy model broke its declared linear lower bound."""
