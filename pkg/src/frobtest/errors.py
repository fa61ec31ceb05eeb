"""Exception hierarchy shared by every layer of the package."""


class FrobtestError(Exception):
    """Base class for all errors raised by frobtest."""


class ParseError(FrobtestError):
    """Malformed polynomial or ideal text.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownVariableError(ParseError):
    pass


class RingMismatchError(FrobtestError):
    """Operands live in different ambient rings."""


class ExponentOverflowError(FrobtestError):
    """A monomial exponent left the supported 32-bit range."""


class ResourceCapExceeded(FrobtestError):
    """A configured budget (reduction steps, degree, stages) was exhausted.

    Callers turn this into a TRUNCATED certificate; it never means a wrong answer.
    """

    def __init__(self, cap, message=""):
        self.cap = cap
        super().__init__(message or f"resource cap exceeded: {cap}")


class NotArtinianError(FrobtestError):
    """The quotient has positive Krull dimension where finite length is required."""


class UnboundedSupportError(FrobtestError):
    """The degree cap did not certify that a graded module has finite support."""


class NotParameterSystemError(FrobtestError):
    """The given sequence is not a system of parameters of the ring."""


class FailedAfterTries(FrobtestError):
    def __init__(self, message, tried=()):
        self.tried = list(tried)
        super().__init__(message)


class SamplingExhausted(FrobtestError):
    pass
