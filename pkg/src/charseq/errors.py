"""Exception hierarchy shared by all charseq modules."""


class CharseqError(Exception):
    """Base class for library errors."""


class DomainError(CharseqError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class HorizonError(CharseqError):
    """A query reaches past the finite horizon of an explicitly given sequence."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NotRefutable(CharseqError):
    """The candidate character is a genuine continuous character."""


class ContinuousCharacter(NotRefutable):
    """Finite-support character of the direct sum; it lies in the group itself."""


class SearchExhausted(CharseqError):
    """The witness search ran out of its configured bound."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class Inconclusive(CharseqError):
    """A limit or verdict is not decidable from the given finite description."""
