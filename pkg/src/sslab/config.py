"""Precision and budget knobs threaded through the numerical kernels."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class PrecisionConfig:
    """Accuracy targets and quadrature budgets.

    rel_tol is the dimensionless relative-error target for a single kernel
    evaluation.  contour_height is the base truncation height for vertical
    line integrals (the engine adds the imaginary parts of the parameters
    on top).  quad_points is the minimum node count per unit length on a
    contour; series_max_terms caps every power-series loop.
    """

    rel_tol: float = 1e-11
    contour_height: float = 40.0
    quad_points: int = 32
    series_max_terms: int = 4096

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol <= 1e-4):
            raise DomainError(f"rel_tol must be in (0, 1e-4], got {self.rel_tol}")
        if self.contour_height < 20.0:
            raise DomainError(f"contour_height must be >= 20, got {self.contour_height}")
        if self.quad_points < 8:
            raise DomainError(f"quad_points must be >= 8, got {self.quad_points}")
        if self.series_max_terms < 64:
            raise DomainError(f"series_max_terms must be >= 64, got {self.series_max_terms}")

    def relaxed(self, rel_tol: float) -> "PrecisionConfig":
        """Copy with a different relative tolerance, budgets unchanged."""
        return PrecisionConfig(rel_tol=rel_tol,
                               contour_height=self.contour_height,
                               quad_points=self.quad_points,
                               series_max_terms=self.series_max_terms)


DEFAULT_PRECISION = PrecisionConfig()
