from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and limits for every numeric routine in the package.

    Attributes:
        series_tol: absolute error target for special-function series.
        root_tol: absolute x-tolerance for bracketed root finding.
        scan_step: grid step used when hunting for the smallest root.
        quad_tol: absolute tolerance for adaptive quadrature.
        max_terms: cap on series terms before giving up.
        max_iters: cap on root-finder iterations.
        max_depth: cap on adaptive quadrature recursion depth.
    """

    series_tol: float = 1e-12
    root_tol: float = 1e-12
    scan_step: float = 1e-3
    quad_tol: float = 1e-8
    max_terms: int = 10_000_000
    max_iters: int = 500
    max_depth: int = 60

    def __post_init__(self) -> None:
        for name in ("series_tol", "root_tol", "quad_tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not 0 < self.scan_step <= 0.1:
            raise DomainError(f"scan_step must lie in (0, 0.1], got {self.scan_step!r}")
        if self.max_terms < 1 or self.max_iters < 1 or self.max_depth < 1:
            raise DomainError("max_terms, max_iters and max_depth must be >= 1")


DEFAULT_CONFIG = SolverConfig()


def check_rate(lam: float) -> float:
    """Validate a growth rate and return it as a float."""
    lam = float(lam)
    if not (lam > 0 and lam < float("inf")):
        raise DomainError(f"growth rate must be positive and finite, got {lam!r}")
    return lam


def check_degree(d: int) -> int:
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise DomainError(f"tree degree must be an integer >= 2, got {d!r}")
    return int(d)
