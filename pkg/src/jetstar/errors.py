"""Exception types shared across the package."""


class JetstarError(Exception):
    pass


class ParseError(JetstarError, ValueError):
    """Syntax error in an expression string; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DimensionMismatch(JetstarError, ValueError):
    pass


class ValidationError(JetstarError, ValueError):
    """Invalid user-supplied configuration or input data."""


class ConvergenceError(JetstarError, RuntimeError):
    """A degree-stratified fixed-point iteration failed to stabilize.

    This signals an internal convention/sign bug, not bad user input.
    """


class GuardrailError(JetstarError, ValueError):
    """A documented size guardrail was exceeded."""
