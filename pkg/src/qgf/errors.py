"""Exception hierarchy shared by the library and the CLI."""


class QGFError(Exception):
    """Base class for all library errors."""


class ResourceLimitError(QGFError):
    """A dense simulation would exceed the desk-scale size budget."""


class DegenerateDenominator(QGFError, ArithmeticError):
    """The filtered norm fell below the numerical floor.

    Raised when the filter has effectively annihilated the initial state, so
    the ratio of weighted overlap sums carries no information.
    """


class AllDegenerate(QGFError):
    """Every point of a parameter scan had a degenerate denominator."""


class UnderflowAnnihilated(QGFError, ArithmeticError):
    """The continuous-variable projection succeeded with probability ~0."""


class ConfigError(QGFError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
