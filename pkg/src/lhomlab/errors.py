"""Exception types shared across the package."""

from __future__ import annotations


class LabError(Exception):
    """Base class for all package errors."""


class InvalidInput(LabError):
    """Malformed graph, instance or file."""


class PreconditionError(LabError):
    """An operation was called on an input outside its domain.

    ``witness`` carries whatever certifies the violation (an induced
    subgraph embedding, a predator quadruple, ...).
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(LabError):
    """A configured search budget was exhausted before an answer was found."""

    def __init__(self, message: str, used=None, limit=None):
        super().__init__(message)
        self.used = used
        self.limit = limit


class SearchCapExceeded(BudgetExceeded):
    """A capped structural search (patterns, cycles, gadgets) was truncated."""


class PredatorFound(PreconditionError):
    """Raised when two lists that should admit a non-edge are complete to each other."""


class InvariantViolation(LabError):
    """An internal assertion derived from a proof obligation failed.

    The ``state`` attribute is a JSON-friendly dump for post mortem analysis.
    """

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class GadgetNotFound(LabError):
    """Bounded gadget search failed.  ``exhausted`` is True when the whole
    reachable state space was explored, so the failure is not a cap artefact."""

    def __init__(self, message: str, details=None, exhausted: bool = False):
        super().__init__(message)
        self.details = details
        self.exhausted = exhausted
