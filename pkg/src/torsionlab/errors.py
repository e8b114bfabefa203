"""Exception types shared across the package."""


class TorsionLabError(Exception):
    """Base class for all package-specific errors."""


class ExpressionSyntaxError(TorsionLabError):
    """Malformed expression text; ``offset`` is the byte position of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(TorsionLabError):
    """Identifier that is neither a chart coordinate nor a bound parameter."""

    def __init__(self, name, offset):
        super().__init__(f"unknown identifier '{name}' (at offset {offset})")
        self.name = name
        self.offset = offset


class EvalDomainError(TorsionLabError):
    """Evaluation left the domain of a subexpression (1/0, log of <=0, ...)."""

    def __init__(self, reason, subexpr, point=None):
        at = "" if point is None else f" at point {[float(x) for x in point]}"
        super().__init__(f"{reason} in subexpression '{subexpr}'{at}")
        self.reason = reason
        self.subexpr = subexpr
        self.point = point


class SingularTetradError(TorsionLabError):
    """Tetrad matrix not invertible at the requested point."""

    def __init__(self, det, point=None):
        at = "" if point is None else f" at point {list(point)}"
        super().__init__(f"singular tetrad, |det| = {abs(det):.3e}{at}")
        self.det = det


class TetradSpecError(TorsionLabError):
    """Malformed or inconsistent tetrad specification (JSON or catalog call)."""


class ConfigError(TorsionLabError):
    """Invalid suite configuration or CLI input."""
