"""Bracketed root finding and adaptive Simpson quadrature.

Both routines are small, dependency free and deliberately conservative: the
functions they are applied to are cheap and smooth, so robustness matters
more than the number of evaluations.
"""
from __future__ import annotations

import math
from typing import Callable, Optional, Tuple

from .errors import BracketError, ConvergenceError

Func = Callable[[float], float]

_EPS = 2.220446049250313e-16


def brent(f: Func, a: float, b: float, xtol: float, max_iters: int = 500,
          fa: Optional[float] = None, fb: Optional[float] = None) -> float:
    """Root of ``f`` in ``[a, b]`` by Brent's method.

    Bisection steps guarantee convergence, inverse quadratic / secant steps
    are taken whenever they stay inside the bracket and shrink it fast
    enough.  ``f(a)`` and ``f(b)`` must differ in sign (or one of them be 0).
    """
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise BracketError(f"f({a})={fa} and f({b})={fb} do not bracket a root")

    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iters):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * _EPS * abs(b) + 0.5 * xtol
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            return b
        if abs(e) < tol or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol else math.copysign(tol, m)
        fb = f(b)
    raise ConvergenceError(f"brent: no convergence within {max_iters} iterations")


def first_sign_change(f: Func, lo: float, hi: float, step: float
                      ) -> Optional[Tuple[float, float, float, float]]:
    """Scan ``[lo, hi]`` on a uniform grid and return the first bracket.

    Returns ``(a, b, f(a), f(b))`` for the leftmost grid cell where ``f``
    changes sign (a grid point where ``f`` vanishes counts as a cell of zero
    width), or ``None`` when the sign never changes.
    """
    n = max(1, int(math.ceil((hi - lo) / step - 1e-9)))
    a = lo
    fa = f(a)
    if fa == 0.0:
        return a, a, fa, fa
    for i in range(1, n + 1):
        b = hi if i == n else lo + i * step
        fb = f(b)
        if fb == 0.0 or (fb > 0) != (fa > 0):
            return a, b, fa, fb
        a, fa = b, fb
    return None


def smallest_root_below_one(f: Func, step: float, xtol: float,
                            max_iters: int = 500, supercritical: bool = False) -> Optional[float]:
    """Smallest root of ``f`` on ``[0, 1)`` for a function positive at 0.

    ``f`` is scanned from 0 in increments of ``step`` up to ``1 - step``.  If
    no sign change is found there but the caller knows the process is
    supercritical (``f < 0`` just below 1), the gap ``(1 - step, 1)`` is
    probed at ``1 - step * 2**-j`` so that roots very close to 1 are not
    mistaken for the trivial root at 1.  Returns ``None`` when no root below
    1 exists.
    """
    hi = 1.0 - step
    bracket = first_sign_change(f, 0.0, hi, step)
    if bracket is None and supercritical:
        a, fa = hi, f(hi)
        for j in range(1, 40):
            b = 1.0 - step * 2.0 ** -j
            fb = f(b)
            if fb == 0.0 or (fb > 0) != (fa > 0):
                bracket = (a, b, fa, fb)
                break
            a, fa = b, fb
    if bracket is None:
        return None
    a, b, fa, fb = bracket
    if a == b:
        return a
    return brent(f, a, b, xtol, max_iters, fa, fb)


def adaptive_simpson(f: Func, a: float, b: float, tol: float, max_depth: int = 60,
                     fa: Optional[float] = None, fb: Optional[float] = None) -> float:
    """Integral of ``f`` over ``[a, b]`` by adaptive Simpson with Richardson correction.

    ``fa``/``fb`` let the caller supply endpoint values, which is how
    removable singularities at the endpoints are patched with their limits.
    Raises ConvergenceError if some panel still misses its share of the
    tolerance at ``max_depth``.
    """
    if a == b:
        return 0.0
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    total = 0.0
    # (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps or (b - a) <= 64.0 * _EPS * max(1.0, abs(m)):
            total += left + right + delta / 15.0
        elif depth >= max_depth:
            raise ConvergenceError(
                f"adaptive_simpson: depth {max_depth} reached on [{a}, {b}]")
        else:
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth + 1))
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))
    return total
