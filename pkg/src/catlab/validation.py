"""Named cross-checks run by ``catlab validate``.

``quick`` runs the analytic identities (a few seconds).  ``full`` adds the
Monte Carlo cross-validation, which takes minutes.  Each check reports a
name, a pass flag and a short detail string; a check that raises counts as
failed with the exception text as detail.

Faults can be injected to confirm that the suite notices a broken build:
``psi3-sign`` forces the "+" radical branch of the d = 3 closed form.
"""
from __future__ import annotations

import functools
import io as _io
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Optional

import numpy as np

from . import analytic as an
from . import io
from .config import DEFAULT_CONFIG
from .special_functions import lerch_phi, lerch_phi_log_reduction, surjection_count
from .survivor_law import SurvivorLaw, survivor_pgf
from .montecarlo import Model, SimConfig, SimSummary, estimate
from .montecarlo.oracles import chi_square_test, jump_chain_row, no_dispersion_mean_time, two_sample_chi_square
from .montecarlo.simulate import sample_aggregate, sample_jumps, sample_offspring, sample_survivors

LEVELS = ("quick", "full")
FAULTS = ("psi3-sign",)
RESIDUAL_TOL = 1e-8
SURVIVOR_LAMBDAS = (0.5, 1.0, 2.0, 5.0, 10.0)
PGF_POINTS = (0.0, 0.25, 0.5, 0.75, 0.9)

#: (label, model, lam) for the 10^5-replicate extinction-probability checks
EXTINCTION_CASES = (
    ("free-4", Model.free(), 4.0),
    ("tree2-6", Model.tree(2), 6.0),
    ("binom-3-0.5", Model.binomial(0.5), 3.0),
    ("geom-10-0.5", Model.geometric(0.5), 10.0),
)
#: (label, model, lam) for the mean-extinction-time checks
MEAN_TIME_CASES = (
    ("no-dispersion-1", Model.no_dispersion(), 1.0),
    ("tree2-1", Model.tree(2), 1.0),
    ("free-1", Model.free(), 1.0),
    ("tree3-1", Model.tree(3), 1.0),
)
NO_DISPERSION_LAMBDAS = (1.0, 3.0, 6.0)
MC_REPLICATES = 100_000


@dataclass(frozen=True)
class CheckResult:
    name: str
    level: str
    passed: bool
    detail: str
    seconds: float


@dataclass(frozen=True)
class _Context:
    seed: int
    faults: frozenset

    def psi3(self, lam: float) -> float:
        branch = "+" if "psi3-sign" in self.faults else "auto"
        return an.psi_tree_closed(3, lam, branch=branch)

    def psi_closed(self, d: int, lam: float) -> float:
        return self.psi3(lam) if d == 3 else an.psi_tree_closed(d, lam)


Outcome = tuple[bool, str]
_REGISTRY: list[tuple[str, str, Callable[[_Context], Outcome]]] = []


def _check(name: str, level: str = "quick"):
    def register(fn: Callable[[_Context], Outcome]):
        _REGISTRY.append((name, level, fn))
        return fn
    return register


def check_names(level: str = "full") -> list[str]:
    allowed = LEVELS[: LEVELS.index(level) + 1]
    return [name for name, lvl, _ in _REGISTRY if lvl in allowed]


# -- Monte Carlo plumbing ------------------------------------------------------

@functools.lru_cache(maxsize=None)
def mc_summary(cfg: SimConfig) -> SimSummary:
    """``estimate(cfg)``, memoized so the same run is never repeated in one process."""
    return estimate(cfg)


def extinction_config(model: Model, lam: float, seed: int = 42,
                      replicates: int = MC_REPLICATES) -> SimConfig:
    return SimConfig(model=model, lam=lam, seed=seed, replicates=replicates,
                     horizon=1e3, colony_cap=100_000)


def mean_time_config(model: Model, lam: float, seed: int = 42,
                     replicates: int = MC_REPLICATES) -> SimConfig:
    return SimConfig(model=model, lam=lam, seed=seed, replicates=replicates, horizon=1e4)


def no_dispersion_config(lam: float, seed: int = 42, replicates: int = 10_000) -> SimConfig:
    return SimConfig(model=Model.no_dispersion(), lam=lam, seed=seed,
                     replicates=replicates, horizon=1e4)


def analytic_psi(model: Model, lam: float) -> float:
    kind = model.kind.value
    if kind == "free":
        return an.psi_free(lam)
    if kind == "tree":
        return an.psi_tree_general(model.d, lam) if model.d > 3 else an.psi_tree_closed(model.d, lam)
    if kind == "geom":
        return an.psi_geometric(lam, model.p)
    if kind == "binom":
        return an.psi_binomial(lam, model.p)
    return 1.0


def analytic_mean_time(model: Model, lam: float) -> float:
    kind = model.kind.value
    if kind == "no_dispersion":
        return no_dispersion_mean_time(lam)
    if kind == "tree":
        return float(an.mean_tau_tree(model.d, lam))
    if kind == "free":
        return float(an.mean_tau_free(lam))
    raise ValueError(f"no analytic mean time for {model.label()}")


def within_sigma(freq: float, psi: float, n: int, k: float = 4.0) -> tuple[bool, float]:
    """Whether ``freq`` is within ``k`` binomial standard deviations of ``psi``."""
    sigma = math.sqrt(psi * (1.0 - psi) / n)
    bound = k * sigma
    return abs(freq - psi) <= bound, bound


def brute_force_surjections(n: int, k: int) -> int:
    """Count onto maps from an n-set to a k-set by listing all ``k**n`` maps."""
    if k == 0:
        return int(n == 0)
    bits = np.left_shift(np.uint16(1), np.arange(k, dtype=np.uint16))
    masks = np.zeros(1, dtype=np.uint16)
    for _ in range(n):
        masks = (masks[:, None] | bits[None, :]).ravel()
    return int(np.count_nonzero(masks == (1 << k) - 1))


def _worst(pairs: Iterable[tuple[float, str]]) -> tuple[float, str]:
    return max(pairs, key=lambda p: p[0], default=(0.0, ""))


# -- special functions ---------------------------------------------------------

@_check("lerch-log-reduction")
def _lerch_reduction(ctx: _Context) -> Outcome:
    tol = 10 * DEFAULT_CONFIG.series_tol
    err, where = _worst((abs(lerch_phi(z, 1.0, a) - lerch_phi_log_reduction(z, a)), f"a={a} z={z}")
                        for a in range(1, 11) for z in (i / 10 for i in range(1, 10)))
    return err <= tol, f"max error {err:.2e} at {where} (tol {tol:.0e})"


@_check("surjection-brute-force")
def _surjection_brute(ctx: _Context) -> Outcome:
    bad = [(n, k) for n in range(9) for k in range(n + 1)
           if surjection_count(n, k) != brute_force_surjections(n, k)]
    return not bad, f"mismatches {bad}" if bad else "n <= 8, k <= n all match"


@_check("surjection-total-probability")
def _surjection_total(ctx: _Context) -> Outcome:
    bad = [(n, d) for n in range(1, 13) for d in range(2, 7)
           if sum(Fraction(comb(d, k) * surjection_count(n, k), d ** n) for k in range(n + 1)) != 1]
    return not bad, f"sums != 1 at {bad}" if bad else "exact for 1 <= n <= 12, 2 <= d <= 6"


# -- survivor law --------------------------------------------------------------

def _law(lam: float) -> tuple[SurvivorLaw, np.ndarray]:
    law = SurvivorLaw(lam, truncation=max(10, SurvivorLaw(lam).truncation))
    while law.tail_bound >= 1e-10:
        law = SurvivorLaw(lam, truncation=2 * law.truncation)
    return law, law.pmf_table()


@_check("survivor-normalization")
def _survivor_norm(ctx: _Context) -> Outcome:
    notes = []
    ok = True
    for lam in SURVIVOR_LAMBDAS:
        law, pmf = _law(lam)
        total = math.fsum(pmf)
        good = total + law.tail_bound >= 1.0 and total <= 1.0 + 1e-9
        ok &= good
        notes.append(f"{lam:g}:{1.0 - total:+.1e}")
    return ok, "1 - sum: " + " ".join(notes)


@_check("survivor-pgf-pmf")
def _survivor_pgf(ctx: _Context) -> Outcome:
    worst = 0.0
    ok = True
    for lam in SURVIVOR_LAMBDAS:
        law, pmf = _law(lam)
        n = np.arange(pmf.size)
        for s in PGF_POINTS:
            series = math.fsum(pmf * np.power(s, n))
            gap = abs(law.pgf(s) - series)
            ok &= gap <= law.tail_bound + 1e-9
            worst = max(worst, gap)
    return ok, f"max |pgf - sum| = {worst:.1e}"


@_check("survivor-mean")
def _survivor_mean(ctx: _Context) -> Outcome:
    ok = True
    notes = []
    for lam in SURVIVOR_LAMBDAS:
        law, pmf = _law(lam)
        # P(N=n) <= z**n/(n+1), so the neglected part of the mean is below (lam+1) z**(N+1)
        bound = (lam + 1.0) * law.tail_bound + 1e-12 * lam
        gap = abs(lam / 2.0 - math.fsum(np.arange(pmf.size) * pmf))
        ok &= gap <= bound
        notes.append(f"{lam:g}:{gap:.1e}")
    return ok, "|lam/2 - sum n p(n)|: " + " ".join(notes)


@_check("survivor-pgf-monotone")
def _survivor_monotone(ctx: _Context) -> Outcome:
    lams = np.linspace(0.1, 20.0, 60)
    for s in (0.0, 0.25, 0.5, 0.75, 0.9, 0.99):
        vals = [survivor_pgf(lam, s) for lam in lams]
        if not all(b < a for a, b in zip(vals, vals[1:])):
            return False, f"not strictly decreasing in lam at s={s}"
    return True, "strictly decreasing in lam on a 60-point grid"


# -- tree model ----------------------------------------------------------------

def _residual(d: int, lam: float, s: float) -> float:
    return abs(an.offspring_law_tree(d, lam).pgf(s) - s)


@_check("offspring-law-occupancy")
def _offspring_occupancy(ctx: _Context) -> Outcome:
    from .montecarlo.tables import occupancy_offspring, survivor_table
    worst = 0.0
    for d in (2, 3, 5, 10):
        for lam in (0.5, 3.0, 8.0):
            law = an.offspring_law_tree(d, lam)
            dp = occupancy_offspring(d, survivor_table(lam))
            worst = max(worst, float(np.max(np.abs(np.array(law.probs) - dp))))
    return worst < 1e-9, f"max |inclusion-exclusion - occupancy recursion| = {worst:.1e}"


@_check("psi2-fixed-point-residual")
def _psi2_residual(ctx: _Context) -> Outcome:
    lam2 = an.critical_lambda(2)
    err, where = _worst((_residual(2, lam, an.psi_tree_closed(2, lam)), f"lam={lam:g}")
                        for lam in (1.0, 4.0, lam2 + 0.5, lam2 + 2, lam2 + 10, 6.0, 8.0))
    return err < RESIDUAL_TOL, f"max residual {err:.1e} at {where}"


@_check("psi3-fixed-point-residual")
def _psi3_residual(ctx: _Context) -> Outcome:
    lam3 = an.critical_lambda(3)
    values = {lam: ctx.psi3(lam) for lam in (1.0, 3.0, lam3 + 0.5, lam3 + 2, lam3 + 10, 4.0, 6.0)}
    out_of_range = [lam for lam, s in values.items() if not 0.0 <= s <= 1.0]
    if out_of_range:
        return False, f"psi3 outside [0, 1] at lam={out_of_range[0]:g}: {values[out_of_range[0]]:.6g}"
    err, where = _worst((_residual(3, lam, s), f"lam={lam:g}") for lam, s in values.items())
    return err < RESIDUAL_TOL, f"max residual {err:.1e} at {where}"


@_check("psi-general-fixed-point-residual")
def _psi_general_residual(ctx: _Context) -> Outcome:
    err, where = _worst((_residual(d, lam, an.psi_tree_general(d, lam)), f"d={d} lam={lam:g}")
                        for d in (2, 3, 5, 10, 20) for lam in (2.5, 4.0, 6.0, 10.0))
    return err < RESIDUAL_TOL, f"max residual {err:.1e} at {where}"


@_check("psi-closed-vs-general")
def _closed_vs_general(ctx: _Context) -> Outcome:
    pairs = []
    for d in (2, 3):
        lam_d = an.critical_lambda(d)
        for lam in (lam_d + 0.5, lam_d + 2, lam_d + 10):
            pairs.append((abs(ctx.psi_closed(d, lam) - an.psi_tree_general(d, lam)), f"d={d} lam={lam:.3f}"))
    err, where = _worst(pairs)
    return err < 1e-8, f"max difference {err:.1e} at {where}"


@_check("tree-threshold-consistency")
def _threshold(ctx: _Context) -> Outcome:
    for d in (2, 3, 5, 10):
        lam_d = an.critical_lambda(d)
        for lam in (lam_d - 0.05, lam_d + 0.05):
            extinct = an.psi_tree_general(d, lam) == 1.0
            if extinct == an.tree_survival_condition(d, lam):
                return False, f"psi == 1 disagrees with the survival criterion at d={d} lam={lam:.4f}"
    return True, "psi == 1 exactly below lam_d and < 1 above, d in {2, 3, 5, 10}"


@_check("psi-monotone")
def _monotone(ctx: _Context) -> Outcome:
    lams = (3.0, 4.0, 5.5, 7.0, 10.0, 15.0)
    for d in (2, 3, 5):
        vals = [an.psi_tree_general(d, lam) for lam in lams]
        if any(b > a + 1e-12 for a, b in zip(vals, vals[1:])):
            return False, f"increasing in lam for d={d}"
    for lam in lams:
        vals = [an.psi_tree_general(d, lam) for d in (2, 3, 5, 10)]
        if any(b > a + 1e-12 for a, b in zip(vals, vals[1:])):
            return False, f"increasing in d at lam={lam:g}"
    return True, "nonincreasing in lam and in d"


@_check("critical-lambda-decreasing")
def _critical_decreasing(ctx: _Context) -> Outcome:
    ds = (2, 3, 5, 7, 10, 20, 50, 100, 200)
    vals = [an.critical_lambda(d) for d in ds]
    strict = all(b < a for a, b in zip(vals, vals[1:]))
    gap = vals[-1] - 2.0
    return strict and 0.0 < gap < 0.02, f"strictly decreasing: {strict}; lam_200 - 2 = {gap:.4f}"


@_check("tau-parameter-identification")
def _tau_params(ctx: _Context) -> Outcome:
    worst = 0.0
    for d in (2, 3):
        for lam in (0.5, 1.0, 3.0, 8.0):
            p = an.offspring_law_tree(d, lam).probs
            params = an.tau_parameters(d, lam)
            expected = {"alpha": p[0]}
            if d == 2:
                expected["beta"] = p[2]
            else:
                expected.update(theta=p[2] + p[3], gamma=p[3])
            worst = max(worst, max(abs(params[k] - v) for k, v in expected.items()))
    return worst < 1e-9, f"max |parameter - p_k expression| = {worst:.1e}"


@_check("tau-tree-vs-narayan")
def _tau_tree_narayan(ctx: _Context) -> Outcome:
    worst = 0.0
    for d in (2, 3):
        for lam in (0.5, 1.0, 2.0):
            law = an.offspring_law_tree(d, lam)
            ref = an.narayan_mean_time(law.pgf, law.mean())
            worst = max(worst, abs(float(an.mean_tau_tree(d, lam)) - ref))
    return worst < 1e-6, f"max |closed form - integral| = {worst:.1e}"


@_check("tau-tree-boundary")
def _tau_tree_boundary(ctx: _Context) -> Outcome:
    vals = [an.mean_tau_tree(d, an.critical_lambda(d)) for d in (2, 3)]
    return all(v.is_infinite for v in vals), f"mean time at lam_d: {[str(v) for v in vals]}"


# -- free model ----------------------------------------------------------------

@_check("free-threshold")
def _free_threshold(ctx: _Context) -> Outcome:
    got = {lam: an.psi_free(lam) for lam in (1.0, 1.9, 2.0, 2.1)}
    ok = got[1.0] == got[1.9] == got[2.0] == 1.0 and 0.0 < got[2.1] < 1.0
    return ok, " ".join(f"{lam:g}:{v:.6f}" for lam, v in got.items())


@_check("psi-free-fixed-point-residual")
def _free_residual(ctx: _Context) -> Outcome:
    err, where = _worst((abs(an.free_fixed_point_gap(lam, an.psi_free(lam))), f"lam={lam:g}")
                        for lam in (2.1, 2.5, 4.0, 10.0, 50.0))
    return err < 1e-10, f"max residual {err:.1e} at {where}"


@_check("tau-free-integral-equivalence")
def _free_integrals(ctx: _Context) -> Outcome:
    err, where = _worst((abs(float(an.mean_tau_free(lam)) - an.mean_tau_free_narayan(lam)), f"lam={lam:g}")
                        for lam in (0.5, 1.0, 1.5))
    return err < 1e-6, f"max difference {err:.1e} at {where}"


@_check("tau-free-small-lambda")
def _free_small(ctx: _Context) -> Outcome:
    lam = 1e-3
    got = float(an.mean_tau_free(lam))
    ref = 1.0 / (1.0 - lam / 2.0)
    return abs(got - ref) < 1e-3, f"{got:.7f} vs {ref:.7f}"


@_check("tau-free-divergence")
def _free_divergence(ctx: _Context) -> Outcome:
    if not an.mean_tau_free(2.0).is_infinite:
        return False, "mean time at lam=2 is finite"
    vals = [an.mean_tau_free_truncated(2.0, c) for c in (1e-2, 1e-4, 1e-6)]
    grows = vals[1] - vals[0] > 1.0 and vals[2] - vals[1] > 1.0
    return grows, "truncated integrals " + ", ".join(f"{v:.3f}" for v in vals)


# -- comparison models ---------------------------------------------------------

@_check("crossover")
def _crossover(ctx: _Context) -> Outcome:
    lam = an.crossover_lambda(0.25)
    # uniform is the milder catastrophe below the crossover and the harsher one above it
    below = an.psi_free(lam - 1.0) < an.psi_binomial(lam - 1.0, 0.25)
    above = an.psi_free(lam + 1.0) > an.psi_binomial(lam + 1.0, 0.25)
    return 10.57 <= lam <= 10.59 and below and above, f"crossover(0.25) = {lam:.4f}"


@_check("uniform-vs-geometric-severity")
def _severity(ctx: _Context) -> Outcome:
    # below p ~ 0.198 geometric catastrophes are the harsher ones around lam ~ 5..11
    for p in (0.2, 0.25, 0.5, 0.75, 0.9):
        for lam in np.linspace(0.25, 30.0, 120):
            if an.psi_free(lam) < an.psi_geometric(lam, p) - 1e-12:
                return False, f"psi_uniform < psi_geometric at p={p} lam={lam:.3f}"
    return True, "psi_uniform >= psi_geometric on the grid"


# -- output plumbing -----------------------------------------------------------

@_check("csv-roundtrip")
def _csv_roundtrip(ctx: _Context) -> Outcome:
    rows = [{"command": "tau", "model": "free", "lambda": lam, "d": None,
             "mean_time": float(an.mean_tau_free(lam))} for lam in (0.5, 1.0, 2.0)]
    rows += [{"command": "table1", "d": d, "lambda_d": v} for d, v in an.table1((2, 3))]
    back = io.read_csv(io.to_csv(rows))
    full = [{k: row.get(k) for k in back[0]} for row in rows]
    return back == full, "exact" if back == full else f"{back} != {full}"


@_check("exit-codes")
def _exit_codes(ctx: _Context) -> Outcome:
    from .cli import main
    cases = {("table1", "--d", "1"): 2, ("simulate", "--model", "free", "--lambda", "4", "--replicates", "0"): 2,
             ("tau", "--model", "free", "--lambda", "3"): 2, ("psi", "--model", "free", "--lambda", "1"): 0}
    bad = []
    for argv, want in cases.items():
        got = main(list(argv), stdout=_io.StringIO(), stderr=_io.StringIO())
        if got != want:
            bad.append(f"{' '.join(argv)} -> {got} (want {want})")
    return not bad, "; ".join(bad) or "0/2 codes as documented"


# -- Monte Carlo ---------------------------------------------------------------

def _register_mc() -> None:
    for label, model, lam in EXTINCTION_CASES:
        def run(ctx: _Context, model=model, lam=lam) -> Outcome:
            s = mc_summary(extinction_config(model, lam, ctx.seed))
            psi = analytic_psi(model, lam)
            ok, bound = within_sigma(s.extinction_frequency, psi, s.replicates)
            return ok, f"freq {s.extinction_frequency:.5f} vs psi {psi:.5f} (4 sigma = {bound:.5f})"
        _check(f"mc-extinction-{label}", "full")(run)

    for label, model, lam in MEAN_TIME_CASES:
        def run(ctx: _Context, model=model, lam=lam) -> Outcome:
            s = mc_summary(mean_time_config(model, lam, ctx.seed))
            ref = analytic_mean_time(model, lam)
            gap = abs(s.mean_extinction_time - ref)
            return (s.extinct_count == s.replicates and gap <= 3 * s.se_extinction_time,
                    f"mean {s.mean_extinction_time:.5f} vs {ref:.5f} ({gap / s.se_extinction_time:.2f} SE,"
                    f" {s.extinct_count} extinct)")
        _check(f"mc-mean-time-{label}", "full")(run)


_register_mc()


@_check("mc-no-dispersion-tiny-lambda", "full")
def _mc_tiny(ctx: _Context) -> Outcome:
    s = mc_summary(SimConfig(Model.no_dispersion(), 1e-4, seed=ctx.seed, replicates=10_000, horizon=1e3))
    return abs(s.mean_extinction_time - 1.0) <= 0.03, f"mean {s.mean_extinction_time:.4f}"


@_check("mc-no-dispersion-extinction", "full")
def _mc_no_dispersion(ctx: _Context) -> Outcome:
    got = {lam: mc_summary(no_dispersion_config(lam, ctx.seed)) for lam in NO_DISPERSION_LAMBDAS}
    ok = all(s.extinct_count == s.replicates for s in got.values())
    return ok, " ".join(f"{lam:g}:{s.extinct_count}/{s.replicates}" for lam, s in got.items())


@_check("mc-subcritical-extinction", "full")
def _mc_subcritical(ctx: _Context) -> Outcome:
    tree = mc_summary(SimConfig(Model.tree(2), 4.0, seed=ctx.seed, replicates=10_000,
                                horizon=1e3, colony_cap=10_000))
    free = mc_summary(SimConfig(Model.free(), 1.5, seed=ctx.seed, replicates=10_000, horizon=1e3))
    ok = tree.extinct_count == tree.replicates and free.extinct_count == free.replicates
    return ok, f"tree(2) lam=4: {tree.extinct_count}/{tree.replicates}; free lam=1.5: {free.extinct_count}/{free.replicates}"


@_check("mc-jump-chain", "full")
def _mc_jump_chain(ctx: _Context) -> Outcome:
    n = 100_000
    worst = 0.0
    for lam in (0.5, 2.0):
        for state in (1, 2, 5):
            row = jump_chain_row(lam, state)
            counts = np.bincount(sample_jumps(lam, state, n, ctx.seed), minlength=row.size)
            if counts.size > row.size:
                return False, f"jump outside 0..{state + 1} from state {state}"
            sd = np.sqrt(n * row * (1.0 - row))
            z = np.abs(counts - n * row)[row > 0] / sd[row > 0]
            if counts[row == 0].any():
                return False, f"impossible transition observed from state {state}"
            worst = max(worst, float(z.max()))
    return worst <= 4.0, f"largest cell deviation {worst:.2f} sigma"


@_check("mc-offspring-law", "full")
def _mc_offspring(ctx: _Context) -> Outcome:
    worst = 1.0
    for d, lam in ((2, 6.0), (3, 4.0), (5, 2.5)):
        law = an.offspring_law_tree(d, lam)
        draws = sample_offspring(Model.tree(d), lam, 100_000, ctx.seed)
        _, _, pval = chi_square_test(np.bincount(draws, minlength=d + 1), law.probs)
        worst = min(worst, pval)
    return worst > 1e-3, f"smallest p-value {worst:.3g}"


@_check("mc-survivor-draw-equivalence", "full")
def _mc_survivors(ctx: _Context) -> Outcome:
    worst = 1.0
    for lam in (1.0, 6.0):
        table = np.minimum(sample_survivors(lam, 100_000, ctx.seed), 20)
        grown = np.minimum(sample_survivors(lam, 100_000, ctx.seed + 1, individual=True), 20)
        _, _, pval = two_sample_chi_square(table, grown)
        worst = min(worst, pval)
    return worst > 1e-3, f"smallest p-value {worst:.3g}"


@_check("mc-leap-aggregate", "full")
def _mc_leap(ctx: _Context) -> Outcome:
    worst = 1.0
    m, n = 8, 20_000
    for model, lam in ((Model.tree(2), 6.0), (Model.free(), 4.0), (Model.binomial(0.5), 3.0)):
        batched = sample_aggregate(model, lam, m, n, ctx.seed)
        single = sample_offspring(model, lam, m * n, ctx.seed + 1).reshape(n, m).sum(axis=1)
        _, _, pval = two_sample_chi_square(batched, single)
        worst = min(worst, pval)
    return worst > 1e-3, f"smallest p-value {worst:.3g}"


@_check("mc-reproducibility", "full")
def _mc_repro(ctx: _Context) -> Outcome:
    base = dict(model=Model.tree(2), lam=6.0, seed=ctx.seed, replicates=500)
    a = estimate(SimConfig(**base, threads=1))
    b = estimate(SimConfig(**base, threads=1))
    c = estimate(SimConfig(**base, threads=3))
    return a == b == c, "identical across repeats and thread counts" if a == b == c else "summaries differ"


@_check("mc-disjoint-seeds", "full")
def _mc_disjoint(ctx: _Context) -> Outcome:
    n = 20_000
    a = mc_summary(extinction_config(Model.free(), 4.0, ctx.seed + 1, n))
    b = mc_summary(extinction_config(Model.free(), 4.0, ctx.seed + 2, n))
    fa, fb = a.extinction_frequency, b.extinction_frequency
    bound = 4 * math.sqrt(fa * (1 - fa) / n + fb * (1 - fb) / n)
    return abs(fa - fb) <= bound, f"{fa:.4f} vs {fb:.4f} (joint 4 sigma = {bound:.4f})"


@_check("mc-summary-accounting", "full")
def _mc_accounting(ctx: _Context) -> Outcome:
    # every run here is memoized by the checks above, so this costs nothing extra
    cfgs = [extinction_config(m, lam, ctx.seed) for _, m, lam in EXTINCTION_CASES]
    cfgs += [mean_time_config(m, lam, ctx.seed) for _, m, lam in MEAN_TIME_CASES]
    cfgs += [no_dispersion_config(lam, ctx.seed) for lam in NO_DISPERSION_LAMBDAS]
    runs = [mc_summary(c) for c in cfgs]
    bad = [s for s in runs
           if s.extinct_count + s.survived_count != s.replicates
           or s.survived_count != s.censored_count + s.cap_count
           or s.extinction_frequency != s.extinct_count / s.replicates]
    return not bad, f"{len(runs)} runs consistent" if not bad else f"{len(bad)} inconsistent runs"


# -- driver --------------------------------------------------------------------

def run_validation(level: str = "quick", seed: int = 42, faults: Iterable[str] = (),
                   progress: Optional[Callable[[CheckResult], None]] = None) -> list[CheckResult]:
    """Run every check up to ``level`` and return their results in order."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    faults = frozenset(faults)
    unknown = faults - set(FAULTS)
    if unknown:
        raise ValueError(f"unknown fault(s) {sorted(unknown)}; known: {list(FAULTS)}")
    ctx = _Context(seed=int(seed), faults=faults)
    allowed = LEVELS[: LEVELS.index(level) + 1]
    results = []
    for name, lvl, fn in _REGISTRY:
        if lvl not in allowed:
            continue
        start = time.perf_counter()
        try:
            passed, detail = fn(ctx)
        except Exception as exc:  # a crashing check is a failing check
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        result = CheckResult(name, lvl, bool(passed), detail, time.perf_counter() - start)
        results.append(result)
        if progress is not None:
            progress(result)
    return results


def format_report(results: list[CheckResult]) -> str:
    width = max((len(r.name) for r in results), default=0)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.seconds:7.2f}s  {r.detail}"
             for r in results]
    failed = [r.name for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed"
                 + (f"; failed: {', '.join(failed)}" if failed else ""))
    return "\n".join(lines) + "\n"
