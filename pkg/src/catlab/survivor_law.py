"""Law of N, the number of individuals surviving one uniform catastrophe.

A colony founded by one individual grows as a Poisson process of rate
``lam`` until an Exp(1) catastrophe strikes; if it holds ``i`` individuals
at that moment, ``Uniform{0, ..., i-1}`` of them survive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig, check_rate
from .errors import DomainError
from .special_functions import Z_MAX, lerch_phi

#: below this distance from s = 1 the pgf is evaluated by its Taylor series
PGF_SERIES_GAP = 1e-8
_PGF_SERIES_TERMS = 6


def default_truncation(lam: float, tail: float = 1e-12) -> int:
    """Smallest ``n`` with ``(lam/(lam+1))**(n+1) < tail``."""
    lam = check_rate(lam)
    log_z = -math.log1p(1.0 / lam)
    n = max(1, int(math.ceil(math.log(tail) / log_z)) - 1)
    while (n + 1) * log_z >= math.log(tail):
        n += 1
    return n


@dataclass(frozen=True)
class SurvivorLaw:
    """Distribution of the survivor count for growth rate ``lam``.

    ``truncation`` is the support cutoff ``N_max`` used by consumers that
    need finite sums; by default the geometric tail beyond it is < 1e-12.
    """

    lam: float
    truncation: int = 0
    cfg: SolverConfig = field(default=DEFAULT_CONFIG, compare=False, repr=False)

    def __post_init__(self) -> None:
        lam = check_rate(self.lam)
        object.__setattr__(self, "lam", lam)
        if lam / (lam + 1.0) > Z_MAX:
            raise DomainError(f"growth rate {lam} too large: lam/(lam+1) exceeds 1 - 1e-12")
        if self.truncation == 0:
            object.__setattr__(self, "truncation", default_truncation(lam))
        elif self.truncation < 1:
            raise DomainError(f"truncation must be >= 1, got {self.truncation}")

    @property
    def z(self) -> float:
        return self.lam / (self.lam + 1.0)

    @property
    def tail_bound(self) -> float:
        """Upper bound on the mass beyond ``truncation``."""
        return self.z ** (self.truncation + 1)

    def pmf(self, n: int) -> float:
        """P(N = n) through the Lerch transcendent."""
        if n < 0 or int(n) != n:
            raise DomainError(f"n must be a nonnegative integer, got {n!r}")
        z = self.z
        return z ** n / (self.lam + 1.0) * lerch_phi(z, 1.0, n + 1.0, self.cfg)

    def pmf_table(self, n_max: int | None = None) -> np.ndarray:
        """``[P(N=0), ..., P(N=n_max)]`` in one pass.

        The top Lerch value is summed directly; the rest follow from the
        downward recurrence ``Phi(z,1,a) = 1/a + z*Phi(z,1,a+1)``, which damps
        rounding errors by a factor ``z`` per step.
        """
        n_max = self.truncation if n_max is None else int(n_max)
        z = self.z
        phi = np.empty(n_max + 1)
        phi[n_max] = lerch_phi(z, 1.0, n_max + 1.0, self.cfg)
        for n in range(n_max - 1, -1, -1):
            phi[n] = 1.0 / (n + 1) + z * phi[n + 1]
        with np.errstate(under="ignore"):
            powers = np.exp(np.arange(n_max + 1) * math.log(z))
        return powers * phi / (self.lam + 1.0)

    def pgf(self, s: float) -> float:
        """E[s**N] = ln(1 + u) / u with ``u = lam * (1 - s)``."""
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"pgf argument must lie in [0, 1], got {s!r}")
        return log1p_ratio(self.lam * (1.0 - s), small=(1.0 - s) <= PGF_SERIES_GAP)

    def mean(self) -> float:
        return self.lam / 2.0


def log1p_ratio(u: float, small: bool = False) -> float:
    """``ln(1+u)/u`` with its continuous extension 1 at ``u = 0``.

    With ``small`` set (and ``u`` below 1e-2) the alternating Taylor series
    ``1 - u/2 + u**2/3 - ...`` is summed instead of dividing.
    """
    if u == 0.0:
        return 1.0
    if small and abs(u) < 1e-2:
        total, term = 0.0, 1.0
        for k in range(_PGF_SERIES_TERMS):
            total += term / (k + 1)
            term *= -u
        return total
    return math.log1p(u) / u


def survivor_pmf(lam: float, n: int, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    return SurvivorLaw(lam, cfg=cfg).pmf(n)


def survivor_pgf(lam: float, s: float) -> float:
    return SurvivorLaw(lam).pgf(s)


def survivor_mean(lam: float) -> float:
    return SurvivorLaw(lam).mean()
