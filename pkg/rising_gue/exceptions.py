from typing import Any, Optional, Sequence

from sly.lex import Token


class RisingGUEException(Exception):
    """
    Base class for all exceptions in this library.
    """

    pass


###############################################################################
# Invalid input
###############################################################################
class ConfigurationError(RisingGUEException):
    """
    Base class for invalid inputs: configurations, levels, indices and sizes.
    """

    pass


class InvalidConfiguration(ConfigurationError):
    """
    Thrown when a configuration is not strictly decreasing or not finite.
    """

    def __init__(self, values: Sequence[float], reason: str):
        self.values = tuple(values)
        self.reason = reason
        super().__init__(f"Invalid configuration {self.values}: {reason}")


class DegenerateConfiguration(ConfigurationError):
    """
    Thrown when two configuration points coincide (within tolerance), so that
    the Vandermonde matrix is singular.
    """

    def __init__(self, i: int, j: int, gap: float):
        self.i = i
        self.j = j
        self.gap = gap
        super().__init__(
            f"Configuration points {i} and {j} coincide (gap {gap:.3e})"
        )


class InvalidLevels(ConfigurationError):
    """
    Thrown when a kernel is queried at levels outside its domain.
    """

    def __init__(self, n1: int, n2: int, allowed: str):
        self.n1 = n1
        self.n2 = n2
        self.allowed = allowed
        super().__init__(f"Levels ({n1}, {n2}) not allowed, expected {allowed}")


class IndexOutOfRange(ConfigurationError):
    """
    Thrown when a basis function is requested with indices outside their range.
    """

    def __init__(self, family: str, index: Any, allowed: str):
        self.family = family
        self.index = index
        self.allowed = allowed
        super().__init__(
            f"Index {index} out of range for '{family}', expected {allowed}"
        )


class DimensionMismatch(ConfigurationError):
    """
    Thrown when two configurations that should differ in length by one (or
    match a chain) do not.
    """

    def __init__(self, expected: int, actual: int, what: str = "configuration"):
        self.expected = expected
        self.actual = actual
        self.what = what
        super().__init__(f"Expected {what} of length {expected}, got {actual}")


class SizeLimit(ConfigurationError):
    """
    Thrown when a verification routine is called beyond its practical size.
    """

    def __init__(self, parameter: str, value: int, limit: int):
        self.parameter = parameter
        self.value = value
        self.limit = limit
        super().__init__(f"'{parameter}' = {value} exceeds the limit of {limit}")


class EdgeEnergy(ConfigurationError):
    """
    Thrown when a bulk energy is not strictly inside (-2, 2).
    """

    def __init__(self, X: float):
        self.X = X
        super().__init__(f"Energy X = {X} is not in the bulk (-2, 2)")


class InvalidDistribution(ConfigurationError):
    """
    Thrown when an entry distribution does not have the required moments.
    """

    def __init__(self, name: str, reason: str):
        self.name = name
        self.reason = reason
        super().__init__(f"Invalid entry distribution '{name}': {reason}")


class SlotCollision(ConfigurationError):
    """
    Thrown when two interior polygon slots land on the same lattice site.
    """

    def __init__(self, N: int, slot: int):
        self.N = N
        self.slot = slot
        super().__init__(
            f"Two configuration points share lattice slot {slot} at N = {N}; "
            "increase N"
        )


class RangeError(ConfigurationError):
    """
    Thrown when a discrete polygon query lies outside the allowed levels.
    """

    def __init__(self, field_name: str, value: int, low: int, high: int):
        self.field_name = field_name
        self.value = value
        self.low = low
        self.high = high
        super().__init__(f"{field_name} = {value} not in [{low}, {high}]")


###############################################################################
# Numerical failures
###############################################################################
class NumericalError(RisingGUEException):
    """
    Base class for failures of the numerical methods.
    """

    pass


class NonConvergence(NumericalError):
    """
    Thrown when an iterative method runs out of refinements or iterations.
    The last two estimates are kept for diagnosis.
    """

    def __init__(self, method: str, previous: Any, last: Any):
        self.method = method
        self.previous = previous
        self.last = last
        super().__init__(
            f"{method} did not converge; last estimates {previous!r} and {last!r}"
        )


class NonFiniteValue(NumericalError):
    """
    Thrown when a quadrature sum is infinite or nan, usually because a node
    hit a singularity of the integrand.
    """

    def __init__(self, method: str, panels: int):
        self.method = method
        self.panels = panels
        super().__init__(f"{method} is not finite with {panels} panels")


class ContourIntersection(NumericalError):
    """
    Thrown when a circle reaches a vertical line it should stay clear of.
    """

    def __init__(self, center: complex, radius: float, abscissa: float):
        self.center = center
        self.radius = radius
        self.abscissa = abscissa
        super().__init__(
            f"Circle around {center} with radius {radius} meets the line "
            f"Re z = {abscissa}"
        )


class LowerHalfPlane(NumericalError):
    """
    Thrown when the action is evaluated off the upper half-plane.
    """

    def __init__(self, z: complex):
        self.z = z
        super().__init__(f"Point {z} is not in the upper half-plane")


class HalfPlaneEscape(NumericalError):
    """
    Thrown when Newton's method cannot be kept in the upper half-plane.
    """

    def __init__(self, trajectory: Sequence[complex]):
        self.trajectory = list(trajectory)
        super().__init__(
            f"Critical point search left the upper half-plane after "
            f"{len(self.trajectory)} steps (last iterate {self.trajectory[-1]})"
        )


class NonNegligibleImaginaryPart(NumericalError):
    """
    Thrown when a correlation determinant has a significant imaginary part.
    """

    def __init__(self, value: complex, tol: float):
        self.value = value
        self.tol = tol
        super().__init__(f"Determinant {value} has |Im| > {tol}")


###############################################################################
# Statistics
###############################################################################
class StatisticsError(RisingGUEException):
    """
    Base class for errors in empirical estimators.
    """

    pass


class EmptyWindow(StatisticsError):
    """
    Thrown when no sample point falls inside the requested window.
    """

    def __init__(self, window: Any):
        self.window = window
        super().__init__(f"No points in window {window}")


###############################################################################
# Experiment configuration
###############################################################################
class ConfigError(RisingGUEException):
    """
    Thrown when an experiment config is invalid. The message names the field.
    """

    def __init__(self, field_name: str, reason: str):
        self.field_name = field_name
        self.reason = reason
        super().__init__(f"Invalid config field '{field_name}': {reason}")


###############################################################################
# Test-function expressions
###############################################################################
class ExpressionSyntaxError(RisingGUEException):
    """
    Base class for syntax errors in test-function expressions.
    """

    pass


class TokenizingException(ExpressionSyntaxError):
    """
    Thrown when the lexer cannot tokenize the expression.
    """

    def __init__(self, token: Token):
        self.token = token
        super().__init__(f"Failed to tokenize at: {token}")


class ParsingException(ExpressionSyntaxError):
    """
    Thrown when the parser cannot parse the expression.
    """

    def __init__(self, token: Optional[Token], eof: bool = False):
        self.token = token
        self.eof = eof
        super().__init__(f"Failed to parse at: {token}")


class FunctionCallException(RisingGUEException):
    """
    Base class for errors in function calls and names.
    """

    pass


class UnknownFunctionException(FunctionCallException):
    """
    Thrown when the parser encounters an undefined function call.
    """

    def __init__(self, function_name: str):
        self.function_name = function_name
        super().__init__(f"Unknown function: '{function_name}'")


class ArgumentCountException(FunctionCallException):
    """
    Thrown when the parser encounters a function called with a wrong number
    of arguments.
    """

    def __init__(self, function_name: str, exp_args: int, given_args: int):
        self.function_name = function_name
        self.exp_args = exp_args
        self.n_args_given = given_args
        super().__init__(
            f"Function '{function_name}' takes {exp_args} arguments. "
            f"{given_args} given."
        )


class UnknownVariableException(FunctionCallException):
    """
    Thrown when an expression refers to a name that is neither a constant nor
    one of the declared variables.
    """

    def __init__(self, name: str, allowed: Sequence[str]):
        self.name = name
        self.allowed = tuple(allowed)
        super().__init__(f"Unknown variable '{name}', expected one of {self.allowed}")


###############################################################################
# Warnings
###############################################################################
class TruncationWarning(RisingGUEException, UserWarning):
    """
    Issued when the tail of a truncated vertical line is not negligible.
    """

    pass


class CoincidenceWarning(RisingGUEException, UserWarning):
    """
    Issued when sampled eigenvalues coincide and were separated by a tiny shift.
    """

    pass
