"""Exception types shared across the package."""


class CircleFeatError(Exception):
    """Base class for every error raised by circlefeat."""


class OutOfRangeError(CircleFeatError, IndexError):
    """A node id is not a valid index into the graph."""


class ParseError(CircleFeatError, ValueError):
    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class EmptyGraphError(CircleFeatError, ValueError):
    """An edge-list file contained no edges."""


class ConfigError(CircleFeatError, ValueError):
    """Invalid parameters or an unsatisfiable request."""


class CapExceededError(CircleFeatError, RuntimeError):
    """Bridge enumeration hit its configured cap."""


class ShapeError(CircleFeatError, ValueError):
    """Array shapes do not line up."""


class NumericError(CircleFeatError, ArithmeticError):
    """A non-finite value showed up where a finite one is required."""
