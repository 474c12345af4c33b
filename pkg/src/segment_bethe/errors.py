"""Shared exception and warning types."""

from __future__ import annotations


class ParameterError(ValueError):
    """Rejected boundary/chain parameters (degenerate or outside the valid domain)."""


class DimensionError(ValueError):
    """Tensor-product dimension outside the supported range."""


class PoleError(ZeroDivisionError):
    """Evaluation point too close to a pole of a rational kernel.

    Carries the name of the offending kernel so sweeps can redraw instead of
    propagating garbage.
    """

    def __init__(self, kernel: str, point: object, distance: float):
        self.kernel = kernel
        self.point = point
        self.distance = distance
        super().__init__(
            f"kernel {kernel!r} evaluated within {distance:.3e} of a pole at {point}"
        )


class ConvergenceError(RuntimeError):
    """An iterative routine (eigensolver, Newton) failed to converge."""


class ConstructionError(ArithmeticError):
    """Two independent construction routes disagreed beyond tolerance."""


class ConditioningWarning(UserWarning):
    """Determinant evaluation close to a pole/degeneracy; digits are being lost."""
