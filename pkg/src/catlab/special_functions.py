"""Lerch transcendent (real arguments) and surjection counts."""
from __future__ import annotations

import math
from math import comb

import mpmath

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import ConvergenceError, DomainError

#: largest |z| accepted by :func:`lerch_phi`
Z_MAX = 1.0 - 1e-12


def lerch_phi(z: float, s: float, a: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Sum of ``z**j / (j + a)**s`` over ``j >= 0``.

    The partial sum is stopped once the geometric remainder bound
    ``|z|**(J+1) / ((J+1+a)**s * (1-|z|))`` drops below ``cfg.series_tol``,
    so the absolute error is at most ``series_tol`` (plus rounding).

    Raises:
        DomainError: if ``|z| > 1 - 1e-12``, ``a <= 0`` or ``s < 1``.
        ConvergenceError: if ``cfg.max_terms`` terms do not suffice.
    """
    z, s, a = float(z), float(s), float(a)
    if not abs(z) <= Z_MAX:
        raise DomainError(f"lerch_phi needs |z| <= 1 - 1e-12, got z={z!r}")
    if not a > 0:
        raise DomainError(f"lerch_phi needs a > 0, got a={a!r}")
    if not s >= 1:
        raise DomainError(f"lerch_phi needs s >= 1, got s={s!r}")
    if z == 0.0:
        return a ** -s

    az = abs(z)
    tail_scale = 1.0 / (1.0 - az)
    tol = cfg.series_tol
    total = 0.0
    zj = 1.0
    for j in range(cfg.max_terms):
        total += zj / (j + a) ** s
        zj *= z
        if abs(zj) / (j + 1 + a) ** s * tail_scale <= tol:
            return total
    raise ConvergenceError(
        f"lerch_phi(z={z}, s={s}, a={a}) did not reach tol={tol} in {cfg.max_terms} terms")


def lerch_phi_log_reduction(z: float, a: int) -> float:
    """``Phi(z, 1, a)`` for integer ``a >= 1`` via the logarithm.

    Uses ``Phi(z, 1, a) = -z**-a * (ln(1-z) + sum_{j<a} z**j / j)``.  The
    bracket cancels down to about ``z**a``, so it is evaluated in mpmath with
    enough extra digits to absorb that loss.  Meant as an independent
    cross-check of the series, not as a fast path.
    """
    if a < 1 or int(a) != a:
        raise DomainError(f"integer a >= 1 required, got {a!r}")
    if not 0.0 < z < 1.0:
        raise DomainError(f"z must lie in (0, 1), got {z!r}")
    a = int(a)
    with mpmath.workdps(30 + int(a * abs(math.log10(z))) + 1):
        zm = mpmath.mpf(z)
        partial = mpmath.fsum(zm ** j / j for j in range(1, a))
        return float(-(mpmath.log1p(-zm) + partial) / zm ** a)


def surjection_count(n: int, k: int) -> int:
    """Number of surjections from an ``n``-set onto a ``k``-set.

    Exact inclusion-exclusion in Python integers, so there is no overflow.
    """
    if n < 0 or k < 0:
        raise DomainError(f"n and k must be nonnegative, got n={n}, k={k}")
    if k > n:
        return 0
    if k == 0:
        return 1 if n == 0 else 0
    return sum((-1) ** i * comb(k, i) * (k - i) ** n for i in range(k + 1))
