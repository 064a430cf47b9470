"""Exception and warning types shared across the package."""


class JostError(Exception):
    """Base class for all package errors."""


class ConfigError(JostError):
    """Bad or missing configuration value."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class UnsupportedEvaluationError(JostError):
    """Potential cannot be evaluated at the requested (complex) radius."""


class NoExponentialDecayError(JostError):
    """Potential carries no exponential decay information."""


class SingularArgumentError(JostError, ZeroDivisionError):
    """Evaluation at a singular point (z = 0, k = 0, ...)."""


class InvalidRotationError(JostError, ValueError):
    """Rotation angle outside (-pi/2, pi/2)."""


class ContourInadequateError(JostError, ArithmeticError):
    """The integration path does not damp a growing exponential."""


class DomainError(JostError):
    """Energy outside the analyticity domain of the tilded system."""


class NonConvergenceError(JostError, ArithmeticError):
    """Iterative solver failed to converge."""


class ZeroDenominatorError(JostError, ZeroDivisionError):
    """b-tilde vanishes, the effective-range function is undefined."""


class ZeroEnergyPoleError(JostError, ZeroDivisionError):
    """alpha_0 vanishes: a pole of the S-matrix sits at E = 0."""


class IllConditionedFitError(JostError):
    """Data do not constrain the requested coefficients."""


class DomainWarning(UserWarning):
    """Energy outside the analyticity domain; result may be unreliable."""


class PoleWarning(UserWarning):
    """f_in vanishes at the evaluation point: an S-matrix pole."""


class NoLowEnergyScatteringWarning(UserWarning):
    """beta_0 vanishes so the low-energy parameters degenerate."""
