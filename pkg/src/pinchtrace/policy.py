"""Truncation and contour policies.

TruncationPolicy governs every infinite series and improper integral in the
package; ContourSpec pins the vertical line and quadrature resolution used
by the inverse Laplace transform. Both are frozen dataclasses so they can
be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

__all__ = ["TruncationPolicy", "ContourSpec", "DEFAULT_POLICY", "default_contour"]


@dataclass(frozen=True)
class TruncationPolicy:
    """Tolerances and caps for series and quadrature truncation.

    rel_tol and abs_tol must lie in (0, 1); the caps must be >= 1.
    A computation stops once its certified tail bound drops below
    rel_tol * |partial sum| + abs_tol, and raises if the relevant cap
    is hit first.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_terms: int = 100_000_000
    max_quad_evals: int = 2_000_000

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < 1.0):
            raise DomainError(f"rel_tol must be in (0, 1), got {self.rel_tol}")
        if not (0.0 < self.abs_tol < 1.0):
            raise DomainError(f"abs_tol must be in (0, 1), got {self.abs_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.max_quad_evals < 1:
            raise DomainError(f"max_quad_evals must be >= 1, got {self.max_quad_evals}")

    def tol(self, scale: float) -> float:
        """Absolute stopping threshold for a partial sum of magnitude `scale`."""
        return self.rel_tol * abs(scale) + self.abs_tol


@dataclass(frozen=True)
class ContourSpec:
    """Vertical Bromwich line Re(z) = a, truncated at |Im z| <= s_max.

    n_nodes counts quadrature nodes over the full symmetric interval
    [-s_max, s_max]; it must be even (conjugate-symmetry folding halves
    it) and at least 64.
    """

    a: float
    s_max: float
    n_nodes: int

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise DomainError(f"contour abscissa must be > 0, got {self.a}")
        if not self.s_max > 0.0:
            raise DomainError(f"s_max must be > 0, got {self.s_max}")
        if self.n_nodes < 64 or self.n_nodes % 2:
            raise DomainError(
                f"n_nodes must be even and >= 64, got {self.n_nodes}"
            )


DEFAULT_POLICY = TruncationPolicy()


def default_contour(T: float) -> ContourSpec:
    """Starting contour for inversion at time T.

    a = 1/T balances the e^{aT} growth factor against decay along the
    line; s_max = 16/T is a deliberately low initial height, later
    doubled adaptively until two refinements agree. Node count matches
    16-point panels of width pi/(4T) over [-s_max, s_max].
    """
    if not T > 0.0:
        raise DomainError(f"inversion time must be > 0, got {T}")
    # 2*s_max / (pi/(4T)) panels, 16 nodes each, both half-lines
    panels = int(2.0 * (16.0 / T) / (3.141592653589793 / (4.0 * T))) + 1
    return ContourSpec(a=1.0 / T, s_max=16.0 / T, n_nodes=max(64, 16 * panels))
