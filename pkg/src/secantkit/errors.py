"""Exception types shared across the toolkit."""

from __future__ import annotations

__all__ = [
    "ToolkitError",
    "DegenerateInputError",
    "NotStableError",
    "InfiniteGainError",
    "AlgebraicLoopError",
    "SimulationDivergedError",
    "ConvergenceError",
]


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DegenerateInputError(ToolkitError, ValueError):
    """Input is structurally unusable (zero polynomial, empty cascade, ...)."""


class NotStableError(ToolkitError, ValueError):
    """An operation required a Hurwitz denominator and did not get one."""


class InfiniteGainError(ToolkitError, ValueError):
    """A certificate needed a finite gain and the block has none."""


class AlgebraicLoopError(ToolkitError, ValueError):
    """A feedback loop closes through static blocks only."""


class ConvergenceError(ToolkitError, ArithmeticError):
    """An iterative numerical procedure failed to converge."""


class SimulationDivergedError(ToolkitError, ArithmeticError):
    """A state left the trust region during integration.

    Carries the abort time and the partial outputs so callers can still
    inspect the trajectory up to the blow-up.
    """

    def __init__(self, message: str, t_abort: float, partial_outputs=None):
        super().__init__(message)
        self.t_abort = t_abort
        self.partial_outputs = partial_outputs
