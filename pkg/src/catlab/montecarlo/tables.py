"""Tabulated offspring laws used by the simulators.

Everything here is built from the survivor pmf and elementary sums; none of
it goes through the analytic solvers, so simulation and analysis stay two
independent routes to the same numbers.
"""
from __future__ import annotations

import math

import numpy as np

from ..survivor_law import SurvivorLaw, default_truncation
from .config import Model, ModelKind

#: mass allowed beyond the end of a table; below double resolution of a uniform draw
TABLE_TAIL = 1e-16


def survivor_table(lam: float) -> np.ndarray:
    """P(N = n) for n up to the point where the remaining mass is < 1e-16."""
    law = SurvivorLaw(lam, truncation=default_truncation(lam, TABLE_TAIL))
    return law.pmf_table()


def occupancy_offspring(d: int, survivor_pmf: np.ndarray) -> np.ndarray:
    """Law of the number of occupied child sites when N survivors pick uniformly among d.

    Coupon-collector recursion: with ``n`` survivors placed and ``k`` sites
    taken, the next survivor lands on a taken site with probability ``k/d``.
    """
    occ = np.zeros(d + 1)
    occ[0] = 1.0
    stay = np.arange(d + 1) / d
    move = (d - np.arange(d + 1) + 1) / d
    out = survivor_pmf[0] * occ
    for n in range(1, survivor_pmf.size):
        new = occ * stay
        new[1:] += occ[:-1] * move[1:]
        occ = new
        out = out + survivor_pmf[n] * occ
    return out


def _colony_size_table(lam: float) -> np.ndarray:
    """P(X = x), x >= 0, for the size of a colony when its catastrophe strikes (X >= 1)."""
    x_max = default_truncation(lam, TABLE_TAIL) + 1
    z = lam / (lam + 1.0)
    sizes = np.zeros(x_max + 1)
    with np.errstate(under="ignore"):
        sizes[1:] = np.exp(np.arange(x_max) * math.log(z)) / (lam + 1.0)
    return sizes


def geometric_cut_table(lam: float, p: float) -> np.ndarray:
    """Survivor law when a colony of size i keeps j >= 1 w.p. p(1-p)**(i-j), 0 w.p. (1-p)**i."""
    sizes = _colony_size_table(lam)
    out = np.zeros(sizes.size)
    log_q = math.log1p(-p)
    for x in range(1, sizes.size):
        w = sizes[x]
        if w == 0.0:
            continue
        j = np.arange(1, x + 1)
        out[1:x + 1] += w * p * np.exp((x - j) * log_q)
        out[0] += w * math.exp(x * log_q)
    return out


def binomial_cut_table(lam: float, p: float) -> np.ndarray:
    """Survivor law when each of the i individuals survives independently w.p. p."""
    sizes = _colony_size_table(lam)
    out = np.zeros(sizes.size)
    lp, lq = math.log(p), math.log1p(-p)
    log_fact = np.array([math.lgamma(k + 1) for k in range(sizes.size)])
    for x in range(1, sizes.size):
        w = sizes[x]
        if w == 0.0:
            continue
        j = np.arange(x + 1)
        log_c = log_fact[x] - log_fact[j] - log_fact[x - j]
        out[:x + 1] += w * np.exp(log_c + j * lp + (x - j) * lq)
    return out


def offspring_table(model: Model, lam: float) -> np.ndarray:
    """Law of the number of colonies replacing one colony at its catastrophe."""
    if model.kind is ModelKind.FREE:
        return survivor_table(lam)
    if model.kind is ModelKind.TREE:
        return occupancy_offspring(model.d, survivor_table(lam))
    if model.kind is ModelKind.FREE_GEOMETRIC:
        return geometric_cut_table(lam, model.p)
    if model.kind is ModelKind.FREE_BINOMIAL:
        return binomial_cut_table(lam, model.p)
    raise ValueError(f"no offspring law for {model.kind}")
