"""Independent reference computations for checking the simulators."""
from __future__ import annotations

import math
from typing import Sequence

import mpmath
import numpy as np

from ..config import check_rate
from ..errors import ConvergenceError


def no_dispersion_mean_time(lam: float, tol: float = 1e-10, start: int = 64,
                            max_states: int = 8192) -> float:
    """Expected extinction time of the no-dispersion colony started at size 1.

    Solves the first-step equations of the continuous-time chain on the
    states ``0..M`` (births out of ``M`` are reflected back to ``M``) and
    doubles ``M`` until successive answers agree to ``tol``.
    """
    lam = check_rate(lam)
    prev = None
    m = start
    while m <= max_states:
        value = _truncated_absorption_time(lam, m)
        if prev is not None and abs(value - prev) <= tol:
            return value
        prev = value
        m *= 2
    raise ConvergenceError(f"truncated system did not settle below {max_states} states")


def _truncated_absorption_time(lam: float, m: int) -> float:
    # unknowns T_1..T_m; T_0 = 0
    rate = lam + 1.0
    a = np.zeros((m, m))
    b = np.full(m, 1.0 / rate)
    for i in range(1, m + 1):
        r = i - 1
        a[r, r] += 1.0
        if i < m:
            a[r, r + 1] -= lam / rate
        else:
            a[r, r] -= lam / rate
        if i > 1:
            a[r, :i - 1] -= 1.0 / (i * rate)
    return float(np.linalg.solve(a, b)[0])


def jump_chain_row(lam: float, state: int) -> np.ndarray:
    """Transition probabilities out of ``state`` for the jump chain, over ``0..state+1``."""
    row = np.full(state + 2, 1.0 / (state * (lam + 1.0)))
    row[state] = 0.0
    row[state + 1] = lam / (lam + 1.0)
    return row


def chi_square_test(observed: Sequence[int], probs: Sequence[float],
                    min_expected: float = 5.0) -> tuple[float, int, float]:
    """Pearson goodness of fit of integer ``observed`` counts against ``probs``.

    Cells with expected count below ``min_expected`` are pooled from the
    right, and any mass of ``probs`` missing from the listed cells is added
    to the last cell.  Returns ``(statistic, dof, p_value)``.
    """
    obs = np.asarray(observed, dtype=float)
    pr = np.asarray(probs, dtype=float)
    size = max(obs.size, pr.size)
    obs = np.pad(obs, (0, size - obs.size))
    pr = np.pad(pr, (0, size - pr.size))
    total = obs.sum()
    pr[-1] += max(0.0, 1.0 - pr.sum())
    exp = pr * total

    cells_o, cells_e = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(obs, exp):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            cells_o.append(acc_o)
            cells_e.append(acc_e)
            acc_o = acc_e = 0.0
    if cells_e:
        cells_o[-1] += acc_o
        cells_e[-1] += acc_e
    if acc_o > 0 and not cells_e:
        cells_o, cells_e = [acc_o], [acc_e]
    o, e = np.array(cells_o), np.array(cells_e)
    mask = e > 0
    if np.any(o[~mask] > 0):
        return math.inf, max(len(e) - 1, 1), 0.0
    stat = float(((o[mask] - e[mask]) ** 2 / e[mask]).sum())
    dof = max(int(mask.sum()) - 1, 1)
    return stat, dof, float(mpmath.gammainc(dof / 2.0, stat / 2.0, mpmath.inf, regularized=True))


def two_sample_chi_square(a: np.ndarray, b: np.ndarray, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Homogeneity test for two integer samples (pooled tail cells)."""
    top = int(max(a.max(initial=0), b.max(initial=0)))
    ca = np.bincount(a, minlength=top + 1).astype(float)
    cb = np.bincount(b, minlength=top + 1).astype(float)
    pooled = (ca + cb) / (ca.sum() + cb.sum())
    # pool cells from the right until each has enough expected mass in both samples
    keep_a, keep_b, keep_p = [], [], []
    acc = [0.0, 0.0, 0.0]
    n_small = min(ca.sum(), cb.sum())
    for x, y, q in zip(ca, cb, pooled):
        acc[0] += x
        acc[1] += y
        acc[2] += q
        if acc[2] * n_small >= min_expected:
            keep_a.append(acc[0])
            keep_b.append(acc[1])
            keep_p.append(acc[2])
            acc = [0.0, 0.0, 0.0]
    if keep_p:
        keep_a[-1] += acc[0]
        keep_b[-1] += acc[1]
        keep_p[-1] += acc[2]
    ka, kb, kp = np.array(keep_a), np.array(keep_b), np.array(keep_p)
    ea, eb = kp * ca.sum(), kp * cb.sum()
    stat = float(((ka - ea) ** 2 / ea).sum() + ((kb - eb) ** 2 / eb).sum())
    dof = max(len(kp) - 1, 1)
    return stat, dof, float(mpmath.gammainc(dof / 2.0, stat / 2.0, mpmath.inf, regularized=True))
