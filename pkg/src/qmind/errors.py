"""Exception hierarchy shared by every qmind module."""


class QmindError(Exception):
    """Base class for all errors raised by this package."""


class CircuitError(QmindError, ValueError):
    """Malformed circuit, gate or state."""


class ExpressionError(QmindError, ValueError):
    """Boolean expression is malformed or has the wrong shape."""


class ParseError(QmindError, ValueError):
    """Text could not be parsed.

    ``position`` is a 0-based character offset for expression text and a
    1-based line number for assembly programs.
    """

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class UnboundVariableError(QmindError, KeyError):
    def __str__(self):
        return f"unbound variable: {self.args[0]!r}"


class UnsupportedGateError(QmindError, ValueError):
    """Gate kind cannot be handled by the requested emitter or transpiler."""


class EegError(QmindError, ValueError):
    """Invalid recording, window or analysis request."""


class AudioError(QmindError, ValueError):
    """Invalid oscillator bank, histogram or sound specification."""
