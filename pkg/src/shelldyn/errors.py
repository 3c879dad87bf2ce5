"""Exception hierarchy shared across the package."""


class ShellDynError(Exception):
    """Base class for all shelldyn errors."""


class DomainError(ShellDynError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NumericDomainError(ShellDynError, ValueError):
    """Inverse-trig/log argument violated its domain beyond the rounding clamp."""


class SingularityError(ShellDynError, ValueError):
    """Evaluation requested exactly at a non-removable singularity (e.g. x = 1)."""


class QuasiRelativismError(ShellDynError, ValueError):
    """Gravitational sphere layer with eta^2 >= 1; the quasi-relativistic model breaks down."""


class PastCollapseError(ShellDynError):
    """Time beyond the center-arrival of a collapsing layer.

    Carries the dimensionless endpoint map value and, when known, the arrival
    time itself.
    """

    def __init__(self, msg, f_endpoint=None, t_arrival=None):
        super().__init__(msg)
        self.f_endpoint = f_endpoint
        self.t_arrival = t_arrival


class PastShockError(ShellDynError):
    """Layer evaluated after its Jacobian zero; the density is no longer single-valued."""


class NotApplicableError(ShellDynError, ValueError):
    """Operation not defined for this interaction/regime/profile combination."""


class ToleranceNotMetError(ShellDynError):
    """Adaptive routine hit its subdivision cap before reaching the tolerance.

    ``best_estimate`` and ``error_estimate`` hold the final state.
    """

    def __init__(self, msg, best_estimate=None, error_estimate=None):
        super().__init__(msg)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate
