"""Exception hierarchy for grazing_maps."""


class GrazingMapsError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GrazingMapsError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class EvalDomainError(GrazingMapsError):
    """Division by zero, log of a non-positive number and similar."""

    def __init__(self, message, location=None, expression=None):
        self.location = location
        self.expression = expression
        if location is not None:
            message = f"{message} at line {location[0]}, column {location[1]}"
        if expression is not None:
            message = f"{message} in '{expression}'"
        super().__init__(message)


class IntegrationError(GrazingMapsError):
    pass


class NoCrossing(GrazingMapsError):
    pass


class AmbiguousBracket(GrazingMapsError):
    pass


class NotOnBoundary(GrazingMapsError):
    pass


class NoConvergence(GrazingMapsError):
    pass


class JacobianSingular(GrazingMapsError):
    pass


class NonpositiveRadicand(GrazingMapsError):
    """L_X^4 H at the base point is not positive, so no real fourth root exists."""


class NotAMultiplicityMRoot(GrazingMapsError):
    pass


class ZeroLeadingDerivative(GrazingMapsError):
    pass


class NoSignChange(GrazingMapsError):
    pass


class UnknownSystem(GrazingMapsError):
    pass


class NonPositiveValues(GrazingMapsError):
    pass


class TooFewPoints(GrazingMapsError):
    pass


class NotOrder4(GrazingMapsError):
    """The analytic maps only apply at a regular grazing point of order 4."""
