"""
Error hierarchy.

``InputError`` subclasses signal a violated precondition (CLI exit code 2,
HTTP 400). ``ComputationError`` subclasses signal that a well-formed
request could not be completed (CLI exit code 3, HTTP 422).
"""

from typing import Optional


class QPCocycleError(Exception):
    """Base class for all package errors."""

    exit_code = 3
    status_code = 500

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InputError(QPCocycleError, ValueError):
    """A precondition on the inputs does not hold."""

    exit_code = 2
    status_code = 400


class ComputationError(QPCocycleError):
    """A computation failed on valid inputs."""

    exit_code = 3
    status_code = 422


class IdenticallyZero(InputError):
    def __init__(self, message: str = "trigonometric polynomial is identically zero"):
        super().__init__(message)


class ZeroCocycle(InputError):
    def __init__(self, message: str = "cocycle matrix is identically zero (Lyapunov exponent is -inf)"):
        super().__init__(message)


class NotRational(InputError):
    def __init__(self, message: str = "frequency must be rational p/q for this operation"):
        super().__init__(message)


class InvalidFrequency(InputError):
    pass


class InadmissibleCoupling(InputError):
    pass


class ZeroLambda2(InputError):
    def __init__(self, message: str = "duality map undefined for lambda2 = 0"):
        super().__init__(message)


class EmptySet(InputError):
    def __init__(self, message: str = "Hausdorff distance needs two nonempty point sets"):
        super().__init__(message)


class AtKink(ComputationError):
    """The requested epsilon sits on a slope change; both one-sided slopes are attached."""

    def __init__(self, eps: float, left_slope: float, right_slope: float):
        super().__init__(
            f"eps={eps:g} is within one grid step of a kink "
            f"(left slope {left_slope:.4f}, right slope {right_slope:.4f}, in 2*pi units)"
        )
        self.eps = eps
        self.left_slope = left_slope
        self.right_slope = right_slope


class SingularInverse(ComputationError):
    """Backward iteration hit a (numerically) singular matrix."""

    def __init__(self, step: int, forward_rate: Optional[float] = None):
        super().__init__(f"backward iteration hit |det| < 1e-12 at step {step}; backward rate undefined")
        self.step = step
        self.forward_rate = forward_rate


class SingularGauge(ComputationError):
    def __init__(self, message: str = "every phase sample was skipped: |c| < 1e-8 on the whole grid"):
        super().__init__(message)
