"""Shared exception types.

Everything raised on purpose by this package derives from MorselabError,
so callers (and the CLI) can distinguish "you asked a bad question" from
genuine bugs.
"""


class MorselabError(Exception):
    """Base class for all deliberate errors."""


class ParseError(MorselabError):
    """Malformed input text (JSON documents, word strings, range syntax)."""


class ValidationError(MorselabError):
    """Structurally invalid data: self-loops, duplicate vertices, bad edges."""


class PreconditionError(MorselabError):
    """An operation's stated hypothesis does not hold for these arguments."""


class ScopeError(MorselabError):
    """The requested verdict is outside the proven scope (e.g. graph has a triangle)."""


class BudgetExceeded(MorselabError):
    """An enumeration grew past its element budget.

    Carries the last fully completed BFS layer so callers can report how far
    the build got.  Partial results are never returned.
    """

    def __init__(self, message: str, layer_reached: int):
        super().__init__(message)
        self.layer_reached = layer_reached


class Unresolved(MorselabError):
    """A distance query could not be certified exact at the current radius."""


class InsufficientData(MorselabError):
    """Not enough finite measurements to run a diagnostic."""
