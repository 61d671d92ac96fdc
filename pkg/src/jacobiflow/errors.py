"""Exception hierarchy for jacobiflow.

Expression-language errors carry a source span (byte offsets into the
expression text) so the CLI can point at the offending token.
"""

from __future__ import annotations


class JacobiFlowError(Exception):
    """Base class for all jacobiflow errors."""


class ExprError(JacobiFlowError):
    """Error tied to a location in an expression string."""

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        self.span = span
        if span is not None:
            message = f"{message} (at chars {span[0]}..{span[1]})"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class UnknownSymbolError(ExprSyntaxError):
    pass


class CoordinateRangeError(ExprSyntaxError):
    """Coordinate index out of range, e.g. q3 in a 2-dof system."""


class EvalDomainError(ExprError, ValueError):
    """Evaluation left the real domain (log of non-positive, division by
    zero, fractional power of a negative base, ...)."""


class NonFiniteError(JacobiFlowError):
    """A computed value or derivative is NaN or infinite."""


class DegenerateLagrangianError(JacobiFlowError):
    """The velocity Hessian of L is (numerically) singular."""


class NonSymmetricJacobianError(JacobiFlowError):
    """Vector field Jacobian is not symmetric where symmetry is required."""

    def __init__(self, message: str, max_asymmetry: float, location=None):
        self.max_asymmetry = max_asymmetry
        self.location = location
        super().__init__(message)


class StepSizeUnderflowError(JacobiFlowError):
    def __init__(self, t: float, h: float):
        self.t = t
        self.h = h
        super().__init__(f"step size underflow at t={t!r} (h={h!r})")


class MaxStepsExceededError(JacobiFlowError):
    def __init__(self, t: float, max_steps: int):
        self.t = t
        self.max_steps = max_steps
        super().__init__(f"exceeded {max_steps} steps at t={t!r}")


class SingularTransformJacobianError(JacobiFlowError):
    """Point-transform Jacobian singular at a trajectory sample."""


class NotIgnorableError(JacobiFlowError):
    """Requested momentum for a coordinate the Lagrangian depends on."""


class UnknownSystemError(JacobiFlowError):
    pass


class MissingParameterError(JacobiFlowError):
    pass


class NonPositiveDefiniteMetricError(JacobiFlowError):
    pass


class NonPositiveCurvatureRadiusError(JacobiFlowError):
    pass


class NonSkewOmegaError(JacobiFlowError):
    pass


class NotAnEquilibriumError(JacobiFlowError):
    pass


class ScenarioError(JacobiFlowError):
    """Scenario file failed validation; message contains the field path."""
