"""Extinction probabilities, mean extinction times and critical parameters.

Models covered:

* tree dispersion on the rooted d-ary tree (each survivor picks one of d
  child sites, at most one new colony per site);
* free dispersion (every survivor founds its own colony);
* free dispersion under geometric or binomial catastrophes, for comparison.

In all dispersal models the colony count is a continuous-time branching
process with Exp(1) lifetimes, so extinction probabilities are the smallest
fixed points of the offspring pgf and mean extinction times (when finite)
are ``int_0^1 (1-y)/(f(y)-y) dy``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Callable, Sequence

import mpmath

from .config import DEFAULT_CONFIG, SolverConfig, check_degree, check_rate
from .errors import BracketError, DomainError, InvariantError
from .numerics import adaptive_simpson, brent, first_sign_change, smallest_root_below_one
from .survivor_law import SurvivorLaw

PROB_TOL = 1e-9


@dataclass(frozen=True)
class ExtendedTime:
    """A mean time that may be infinite.

    Infinite values are only ever produced through :meth:`infinite`; they
    serialize as the literal ``inf``.
    """

    value: float

    def __post_init__(self) -> None:
        if math.isnan(self.value) or self.value < 0:
            raise InvariantError(f"mean time must be >= 0 or infinite, got {self.value!r}")

    @classmethod
    def infinite(cls) -> "ExtendedTime":
        return cls(math.inf)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return "inf" if self.is_infinite else repr(self.value)


# -- survival criterion and critical parameters ---------------------------

def _criterion_gap(d: int, lam: float) -> float:
    """``lam - d**2/(d-1) * ln((lam+d)/d)``; positive exactly when C_d survives."""
    return lam - d * d / (d - 1.0) * math.log1p(lam / d)


def tree_survival_condition(d: int, lam: float) -> bool:
    """True iff the tree-dispersion process survives with positive probability."""
    d, lam = check_degree(d), check_rate(lam)
    return _criterion_gap(d, lam) > 0.0


def critical_lambda(d: int, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Critical growth rate of the tree model: survival iff ``lam > critical_lambda(d)``."""
    d = check_degree(d)
    lo = 1e-6
    f_lo = _criterion_gap(d, lo)
    if not f_lo < 0:
        raise BracketError(f"criterion not negative near 0 for d={d}")
    hi = 4.0
    f_hi = _criterion_gap(d, hi)
    while f_hi <= 0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if hi > 1e12:
            raise BracketError(f"could not bracket the critical parameter for d={d}")
        f_hi = _criterion_gap(d, hi)
    return brent(lambda x: _criterion_gap(d, x), lo, hi, cfg.root_tol, cfg.max_iters, f_lo, f_hi)


# -- tree dispersion --------------------------------------------------------

@dataclass(frozen=True)
class OffspringLaw:
    """Colony offspring distribution ``probs[k] = P(k new colonies)``."""

    probs: tuple[float, ...]

    def pgf(self, s: float) -> float:
        acc = 0.0
        for p in reversed(self.probs):
            acc = acc * s + p
        return acc

    def mean(self) -> float:
        return math.fsum(k * p for k, p in enumerate(self.probs))

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, k: int) -> float:
        return self.probs[k]


def offspring_law_tree(d: int, lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> OffspringLaw:
    """Offspring law of the tree model.

    ``p_k = C(d,k) * sum_i (-1)**i C(k,i) h((k-i)/d)`` for ``1 <= k < d``, with
    ``h`` the survivor pgf; this is the closed resummation of
    ``sum_n C(d,k) T(n,k)/d**n P(N=n)``.  The alternating sum cancels badly in
    double precision once ``d`` exceeds ~10, so it is evaluated with mpmath at
    a working precision that grows with ``d``.
    """
    d, lam = check_degree(d), check_rate(lam)
    with mpmath.workdps(25 + int(math.ceil(0.48 * d))):
        mlam = mpmath.mpf(lam)

        def h(j: int):
            u = mlam * (d - j) / d
            return mpmath.log1p(u) / u

        hs = [h(j) for j in range(d)]
        probs = [hs[0]]
        for k in range(1, d):
            acc = mpmath.fsum((-1) ** i * comb(k, i) * hs[k - i] for i in range(k + 1))
            probs.append(comb(d, k) * acc)
        probs.append(1 - mpmath.fsum(probs))
        floats = [float(p) for p in probs]

    for k, p in enumerate(floats):
        if p < -PROB_TOL or p > 1 + PROB_TOL:
            raise InvariantError(f"offspring probability p_{k}={p} out of range (d={d}, lam={lam})")
    floats = [min(max(p, 0.0), 1.0) for p in floats]
    if abs(floats[0] - math.log1p(lam) / lam) > PROB_TOL:
        raise InvariantError("p_0 disagrees with P(N=0)")
    return OffspringLaw(tuple(floats))


def _psi3_candidates(lam: float) -> tuple[float, float]:
    a = math.log1p(lam) / lam
    b = math.log1p(2.0 * lam / 3.0) / (2.0 * lam)
    c = math.log1p(lam / 3.0) / lam
    disc = (1.0 - 9.0 * b) ** 2 + 4.0 * a * (2.0 - 9.0 * c)
    root = math.sqrt(disc) if disc >= 0 else math.nan
    denom = 2.0 * (a - 9.0 * b + 9.0 * c - 1.0)
    base = 1.0 + 2.0 * a - 9.0 * b
    return (base + root) / denom, (base - root) / denom


def psi_tree_closed(d: int, lam: float, branch: str = "auto") -> float:
    """Closed-form extinction probability of the tree model for ``d`` in {2, 3}.

    For ``d = 3`` the quadratic has two roots.  ``branch='auto'`` keeps the
    root in ``[0, 1]`` that satisfies the offspring fixed-point equation to
    1e-8 (falling back to 1); ``'+'`` or ``'-'`` force one sign of the
    radical and only apply the ``min(1, .)`` clamp.
    """
    d, lam = check_degree(d), check_rate(lam)
    if d == 2:
        l1 = math.log1p(lam)
        denom = lam + l1 - 4.0 * math.log1p(lam / 2.0)
        return 1.0 if denom <= 0 else min(1.0, l1 / denom)
    if d != 3:
        raise DomainError(f"closed form only available for d in (2, 3), got d={d}")

    plus, minus = _psi3_candidates(lam)
    if branch == "+":
        return min(1.0, plus)
    if branch == "-":
        return min(1.0, minus)
    if branch != "auto":
        raise DomainError(f"branch must be 'auto', '+' or '-', got {branch!r}")
    law = offspring_law_tree(3, lam)
    valid = [s for s in (minus, plus)
             if 0.0 <= s < 1.0 and abs(law.pgf(s) - s) < 1e-8]
    return min(valid) if valid else 1.0


def psi_tree_general(d: int, lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Smallest fixed point in [0, 1] of the tree offspring pgf, for any ``d >= 2``."""
    law = offspring_law_tree(d, lam, cfg)
    root = smallest_root_below_one(lambda s: law.pgf(s) - s, cfg.scan_step, cfg.root_tol,
                                   cfg.max_iters, supercritical=law.mean() > 1.0)
    return 1.0 if root is None else root


def _tau2_params(lam: float) -> tuple[float, float]:
    alpha = math.log1p(lam) / lam
    beta = 1.0 - (4.0 * math.log(lam + 2.0) - math.log(16.0) - math.log1p(lam)) / lam
    return alpha, beta


def _tau3_params(lam: float) -> tuple[float, float, float]:
    alpha = math.log1p(lam) / lam
    l27 = 3.0 * math.log(27.0)
    theta = 1.0 - (9.0 * math.log(2.0 * lam + 3.0) - l27 - 4.0 * math.log1p(lam)) / (2.0 * lam)
    gamma = 1.0 - (18.0 * math.log(lam + 3.0) + 2.0 * math.log1p(lam) - l27
                   - 9.0 * math.log(2.0 * lam + 3.0)) / (2.0 * lam)
    return alpha, theta, gamma


def tau_parameters(d: int, lam: float) -> dict[str, float]:
    """The constants entering the closed-form mean extinction time."""
    d, lam = check_degree(d), check_rate(lam)
    if d == 2:
        alpha, beta = _tau2_params(lam)
        return {"alpha": alpha, "beta": beta}
    if d == 3:
        alpha, theta, gamma = _tau3_params(lam)
        return {"alpha": alpha, "theta": theta, "gamma": gamma}
    raise DomainError(f"closed-form mean time only available for d in (2, 3), got d={d}")


def mean_tau_tree(d: int, lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> ExtendedTime:
    """Mean extinction time of the tree model for ``d`` in {2, 3} and ``lam <= lam_d``.

    Inputs within ``cfg.root_tol`` of the critical value resolve to the
    infinite branch.
    """
    d, lam = check_degree(d), check_rate(lam)
    if d not in (2, 3):
        raise DomainError(f"closed-form mean time only available for d in (2, 3), got d={d}")
    lam_c = critical_lambda(d, cfg)
    if abs(lam - lam_c) <= cfg.root_tol:
        return ExtendedTime.infinite()
    if lam > lam_c:
        raise DomainError(
            f"lam={lam} exceeds the critical value {lam_c:.6f}; mean extinction time undefined")
    if d == 2:
        alpha, beta = _tau2_params(lam)
        return ExtendedTime(math.log(alpha / (alpha - beta)) / beta)
    alpha, theta, gamma = _tau3_params(lam)
    r = math.sqrt(4.0 * alpha * gamma + theta * theta)
    w = 2.0 * alpha - theta
    return ExtendedTime(math.log((w + r) / (w - r)) / r)


# -- free dispersion ------------------------------------------------------

def free_fixed_point_gap(lam: float, s: float) -> float:
    """``ln(1 + lam(1-s)) - lam*s*(1-s)``; its smallest zero is the extinction probability."""
    return math.log1p(lam * (1.0 - s)) - lam * s * (1.0 - s)


def psi_free(lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Extinction probability under free dispersion; exactly 1 for ``lam <= 2``."""
    lam = check_rate(lam)
    if lam <= 2.0 + cfg.root_tol:
        return 1.0
    root = smallest_root_below_one(lambda s: free_fixed_point_gap(lam, s), cfg.scan_step,
                                   cfg.root_tol, cfg.max_iters, supercritical=True)
    if root is None:
        raise BracketError(f"no root of the fixed-point equation below 1 for lam={lam}")
    return root


def _log_remainder(x: float) -> float:
    """``(ln(1+x) - x + x**2/2) / x**2`` without cancellation near 0."""
    if abs(x) < 0.1:
        total, term = 0.0, x
        for k in range(3, 24):
            total += term / k if k % 2 else -term / k
            term *= x
        return total
    return (math.log1p(x) - x + 0.5 * x * x) / (x * x)


def free_time_integrand(lam: float, x: float) -> float:
    """``x**2 / (lam ln(1+x) - x(lam-x))``, equal to ``1/(1 - lam/2)`` at ``x = 0``."""
    return 1.0 / ((1.0 - 0.5 * lam) + lam * _log_remainder(x))


def mean_tau_free(lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> ExtendedTime:
    """Mean extinction time under free dispersion for ``lam <= 2``; infinite at 2."""
    lam = check_rate(lam)
    if abs(lam - 2.0) <= cfg.root_tol:
        return ExtendedTime.infinite()
    if lam > 2.0:
        raise DomainError(f"lam={lam} > 2: extinction is not certain, mean time undefined")
    integral = adaptive_simpson(lambda x: free_time_integrand(lam, x), 0.0, lam,
                                cfg.quad_tol * lam, cfg.max_depth)
    return ExtendedTime(integral / lam)


def mean_tau_free_truncated(lam: float, cutoff: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """The mean-time integral restricted to ``[cutoff, lam]``; used to exhibit divergence at 2."""
    lam = check_rate(lam)
    if not 0 < cutoff < lam:
        raise DomainError("cutoff must lie in (0, lam)")
    integral = adaptive_simpson(lambda x: free_time_integrand(lam, x), cutoff, lam,
                                cfg.quad_tol * lam, cfg.max_depth)
    return integral / lam


def narayan_mean_time(pgf: Callable[[float], float], mean_offspring: float,
                      cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """``int_0^1 (1-y)/(f(y)-y) dy`` for a subcritical offspring pgf ``f``.

    This is the mean extinction time of a branching process with Exp(1)
    lifetimes started from one particle.  The integrand tends to
    ``1/(1 - mean_offspring)`` at ``y = 1``, which patches the endpoint.
    """
    if not mean_offspring < 1.0:
        raise DomainError("narayan_mean_time needs a strictly subcritical offspring law")

    def integrand(y: float) -> float:
        return (1.0 - y) / (pgf(y) - y)

    return adaptive_simpson(integrand, 0.0, 1.0, cfg.quad_tol, cfg.max_depth,
                            fb=1.0 / (1.0 - mean_offspring))


def mean_tau_free_narayan(lam: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """Free-dispersion mean time through the pgf form, for ``lam < 2``."""
    law = SurvivorLaw(check_rate(lam))
    return narayan_mean_time(law.pgf, law.mean(), cfg)


# -- comparison catastrophes ------------------------------------------------

def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    return p


def psi_geometric(lam: float, p: float) -> float:
    """Extinction probability of free dispersion under geometric catastrophes."""
    lam, p = check_rate(lam), _check_p(p)
    return min((1.0 - p) * (lam + 1.0) / (lam * (1.0 + lam * p)), 1.0)


def psi_binomial(lam: float, p: float) -> float:
    """Extinction probability of free dispersion under binomial catastrophes."""
    lam, p = check_rate(lam), _check_p(p)
    return min((1.0 - p) / (lam * p), 1.0)


def crossover_lambda(p: float, cfg: SolverConfig = DEFAULT_CONFIG,
                     lam_max: float = 1e3, lam_step: float = 0.5) -> float:
    """Growth rate above which uniform catastrophes beat binomial ones in severity.

    Defined for ``0 < p < 1/3`` as the root of ``psi_free(lam) = psi_binomial(lam, p)``
    on ``lam > 2``.  On ``(2, (1-p)/p]`` the binomial model dies out surely
    while the uniform one does not, so the scan starts at ``(1-p)/p``.
    """
    p = _check_p(p)
    if not p < 1.0 / 3.0:
        raise DomainError(f"crossover only exists for p < 1/3, got p={p}")

    def gap(lam: float) -> float:
        return psi_free(lam, cfg) - psi_binomial(lam, p)

    start = (1.0 - p) / p
    bracket = first_sign_change(gap, start, lam_max, lam_step)
    if bracket is None:
        raise BracketError(f"no crossing of the uniform and binomial curves in (2, {lam_max}]")
    a, b, fa, fb = bracket
    if a == b:
        return a
    return brent(gap, a, b, cfg.root_tol, cfg.max_iters, fa, fb)


def table1(d_values: Sequence[int], cfg: SolverConfig = DEFAULT_CONFIG) -> list[tuple[int, float]]:
    return [(d, critical_lambda(d, cfg)) for d in d_values]
