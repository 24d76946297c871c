"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes, so library code should raise
the most specific class that applies.
"""


class WeakformError(Exception):
    """Base class for all library errors."""


class ValidationError(WeakformError, ValueError):
    """Invalid input data: bad parameters, meshes, matrices, configs."""


class UnderdampedViolationError(ValidationError):
    """Damping ratio xi >= 1; the analytic machinery is undefined there."""


class NonClassicalDampingError(ValidationError):
    """Damping matrix does not decouple in the undamped mode basis."""


class ExceptionalHorizonError(WeakformError):
    """sin(omega_d * t_bar) vanishes; the boundary map degenerates.

    Carries enough context to suggest a usable horizon perturbation.
    """

    def __init__(self, message, t_bar=None, distance=None, suggestion=None, mode=None):
        super().__init__(message)
        self.t_bar = t_bar
        self.distance = distance
        self.suggestion = suggestion
        self.mode = mode


class NumericalError(WeakformError):
    """Linear-algebra failure: singular or hopelessly ill-conditioned system."""


class DegenerateClosureError(NumericalError):
    """The scalar equation fixing x(t_bar) has a vanishing coefficient."""

    def __init__(self, message, coefficient=None):
        super().__init__(message)
        self.coefficient = coefficient


class InvariantViolationError(WeakformError):
    """An audited invariant (energy law, monotone convergence) failed."""
