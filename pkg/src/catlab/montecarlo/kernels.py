"""Compiled per-replicate simulation kernels.

Every kernel takes a ``numpy.random.Generator`` that belongs to one replicate
only, so results never depend on how replicates are scheduled.

Outcome codes: 0 extinct, 1 alive at the horizon, 2 exceeded the cap.
"""
import math

import numba as nb
import numpy as np

NO_DISPERSION, TREE, FREE, FREE_GEOMETRIC, FREE_BINOMIAL = 0, 1, 2, 3, 4
EXTINCT, CENSORED, CAPPED = 0, 1, 2


@nb.njit(cache=True, nogil=True)
def draw_table(g, cum):
    """Inverse-CDF draw from a cumulative table; -1 if the uniform falls past its end."""
    u = g.random()
    if u >= cum[cum.size - 1]:
        return -1
    lo, hi = 0, cum.size - 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


@nb.njit(cache=True, nogil=True)
def colony_size_by_growth(g, lam):
    """Size at catastrophe: Poisson(lam * T) births on top of the founder, T ~ Exp(1)."""
    t = g.standard_exponential()
    return 1 + g.poisson(lam * t)


@nb.njit(cache=True, nogil=True)
def colony_size_direct(g, lam):
    """Same law as :func:`colony_size_by_growth`, sampled as a geometric count."""
    return g.geometric(1.0 / (lam + 1.0))


@nb.njit(cache=True, nogil=True)
def survivors_uniform(g, lam, cum, individual):
    if not individual:
        n = draw_table(g, cum)
        if n >= 0:
            return n
    x = colony_size_by_growth(g, lam)
    return g.integers(0, x)


@nb.njit(cache=True, nogil=True)
def occupied_sites(g, n, d, seen):
    """Number of distinct sites hit when n survivors each pick one of d sites."""
    for i in range(d):
        seen[i] = False
    k = 0
    for _ in range(n):
        site = g.integers(0, d)
        if not seen[site]:
            seen[site] = True
            k += 1
            if k == d:
                break
    return k


@nb.njit(cache=True, nogil=True)
def draw_offspring(g, kind, lam, d, p, cum, individual, seen):
    """Number of colonies that replace one colony struck by a catastrophe."""
    if kind == FREE:
        return survivors_uniform(g, lam, cum, individual)
    if kind == TREE:
        n = survivors_uniform(g, lam, cum, individual)
        return occupied_sites(g, n, d, seen)
    if individual:
        x = colony_size_by_growth(g, lam)
    else:
        x = colony_size_direct(g, lam)
    if kind == FREE_BINOMIAL:
        return g.binomial(x, p)
    # geometric catastrophe: x minus a geometric number of failures, floored at 0
    f = g.geometric(p) - 1
    return x - f if f < x else 0


@nb.njit(cache=True, nogil=True)
def aggregate_offspring(g, m, pmf):
    """Total offspring of m independent catastrophes, via a multinomial over ``pmf``.

    The multinomial is drawn as a chain of conditional binomials; the last
    cell absorbs whatever mass lies beyond the table.
    """
    remaining = m
    rest = 1.0
    total = 0
    last = pmf.size - 1
    for j in range(pmf.size):
        if remaining == 0:
            break
        if j == last:
            c = remaining
        else:
            q = pmf[j] / rest if rest > 0.0 else 1.0
            if q >= 1.0:
                c = remaining
            elif q <= 0.0:
                c = 0
            else:
                c = g.binomial(remaining, q)
        total += j * c
        remaining -= c
        rest -= pmf[j]
    return total


@nb.njit(cache=True, nogil=True)
def run_branching(g, kind, lam, d, p, cum, leap_pmf, horizon, cap, leap_threshold, individual):
    """One replicate of a dispersal model, started from a single colony.

    Exact event simulation while fewer than ``leap_threshold`` colonies are
    alive: with k colonies the next catastrophe comes after Exp(k) time and
    strikes a uniformly chosen colony (memoryless clocks).  From
    ``leap_threshold`` colonies on, k//2 catastrophes are processed per step
    by aggregating their offspring; the count can then not reach 0 inside a
    step, the cap is checked at step ends, and elapsed time is approximated
    by the log-mean of the k-path.
    """
    seen = np.zeros(max(d, 1), dtype=np.bool_)
    k = 1
    t = 0.0
    while True:
        if leap_threshold > 0 and k >= leap_threshold:
            m = k // 2
            k_new = k - m + aggregate_offspring(g, m, leap_pmf)
            if k_new == k:
                dt = m / k
            else:
                dt = m * math.log(k_new / k) / (k_new - k)
            t += dt
            if t > horizon:
                return CENSORED, t
            k = k_new
            if k > cap:
                return CAPPED, t
            continue
        t += g.standard_exponential() / k
        if t > horizon:
            return CENSORED, t
        k += draw_offspring(g, kind, lam, d, p, cum, individual, seen) - 1
        if k == 0:
            return EXTINCT, t
        if k > cap:
            return CAPPED, t


@nb.njit(cache=True, nogil=True)
def jump(g, x, lam):
    """One step of the jump chain of the no-dispersion colony (x >= 1)."""
    if g.random() < lam / (lam + 1.0):
        return x + 1
    return g.integers(0, x)


@nb.njit(cache=True, nogil=True)
def run_no_dispersion(g, lam, horizon, cap):
    """One replicate of the single colony with uniform catastrophes, from size 1."""
    x = 1
    t = 0.0
    rate = lam + 1.0
    while True:
        t += g.standard_exponential() / rate
        if t > horizon:
            return CENSORED, t
        x = jump(g, x, lam)
        if x == 0:
            return EXTINCT, t
        if x > cap:
            return CAPPED, t


@nb.njit(cache=True, nogil=True)
def sample_offspring_many(g, n, kind, lam, d, p, cum, individual):
    seen = np.zeros(max(d, 1), dtype=np.bool_)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = draw_offspring(g, kind, lam, d, p, cum, individual, seen)
    return out


@nb.njit(cache=True, nogil=True)
def sample_survivors_many(g, n, lam, cum, individual):
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = survivors_uniform(g, lam, cum, individual)
    return out


@nb.njit(cache=True, nogil=True)
def sample_jumps_many(g, n, x, lam):
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = jump(g, x, lam)
    return out


@nb.njit(cache=True, nogil=True)
def sample_aggregate_many(g, n, m, pmf):
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = aggregate_offspring(g, m, pmf)
    return out
