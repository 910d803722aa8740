"""Exception hierarchy shared by every module of the package."""


class BrowderError(Exception):
    """Base class for all package errors."""


# geometry
class InvalidParamSpace(BrowderError, ValueError):
    pass


class DimensionError(BrowderError, ValueError):
    pass


class InvalidGrid(BrowderError, ValueError):
    pass


# mapdef
class MapSyntaxError(BrowderError, ValueError):
    """Malformed map expression; ``position`` is the 0-based offset in the text."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifier(BrowderError, ValueError):
    def __init__(self, name, position):
        super().__init__(f"UnknownIdentifier {name} at position {position}")
        self.name = name
        self.position = position


class ArityMismatch(BrowderError, ValueError):
    pass


class NonFiniteValue(BrowderError, ArithmeticError):
    pass


class UnknownFixture(BrowderError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown fixture"


# index_core
class BoundaryFixedPoint(BrowderError):
    """Residual on the region boundary fell below the required margin."""

    def __init__(self, message, min_residual=None, margin=None):
        super().__init__(message)
        self.min_residual = min_residual
        self.margin = margin


class RefinementExhausted(BrowderError):
    pass


class SingularJacobian(BrowderError):
    pass


# fixset
class EmptyFixedSet(BrowderError):
    pass


class CannotIsolate(BrowderError):
    pass


# certify
class InconsistentSliceIndices(BrowderError):
    def __init__(self, message, component_index=None):
        super().__init__(message)
        self.component_index = component_index


class ResolutionExhausted(BrowderError):
    pass


# problem files
class ParseError(BrowderError, ValueError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


class ValidationError(BrowderError, ValueError):
    """Problem-file content is well-formed JSON but semantically invalid."""

    def __init__(self, field, detail=""):
        super().__init__(f"{field}: {detail}" if detail else field)
        self.field = field
        self.detail = detail


class ProblemIOError(BrowderError, OSError):
    pass
