import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catlab import analytic as an
from catlab.errors import DomainError
from catlab.montecarlo.tables import occupancy_offspring, survivor_table


def mp_critical(d: int) -> float:
    """Critical rate solved at 40 digits, independently of the package."""
    with mpmath.workdps(40):
        f = lambda x: x - mpmath.mpf(d * d) / (d - 1) * mpmath.log(1 + x / d)
        return float(mpmath.findroot(f, (1.5, 12), solver="anderson"))


# -- criterion and critical parameters -------------------------------------

def test_survival_condition_examples():
    assert an.tree_survival_condition(2, 6.0)
    assert not an.tree_survival_condition(2, 4.0)
    assert an.tree_survival_condition(10, 2.31)
    assert not an.tree_survival_condition(10, 2.29)


@pytest.mark.parametrize("d,published", [(2, 5.026), (3, 3.432), (5, 2.693), (7, 2.456),
                                         (10, 2.302), (100, 2.027), (200, 2.013)])
def test_critical_lambda_table(d, published):
    assert abs(an.critical_lambda(d) - published) <= 0.001
    assert f"{an.critical_lambda(d):.3f}" == f"{published:.3f}"


@pytest.mark.parametrize("d", [2, 3, 5, 7, 10, 20, 50, 100, 200, 1000])
def test_critical_lambda_matches_high_precision(d):
    assert an.critical_lambda(d) == pytest.approx(mp_critical(d), abs=1e-11)


def test_critical_lambda_large_degrees():
    # the rounded values for d = 20 and 50 come out as 2.142 and 2.055
    assert f"{an.critical_lambda(20):.3f}" == "2.142"
    assert f"{an.critical_lambda(50):.3f}" == "2.055"
    # 2 + 8/(3d) is only the first-order approximation, and it lies on the extinct side
    for d in (20, 50):
        assert not an.tree_survival_condition(d, 2 + 8 / (3 * d))


def test_critical_lambda_decreasing_to_two():
    vals = [an.critical_lambda(d) for d in (2, 3, 5, 7, 10, 20, 50, 100, 200)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert 0 < vals[-1] - 2 < 0.02


@pytest.mark.parametrize("d", [0, 1, 2.5, -3])
def test_degree_validation(d):
    with pytest.raises(DomainError):
        an.critical_lambda(d)


# -- offspring law -----------------------------------------------------------

@given(st.floats(0.05, 50.0))
@settings(max_examples=40)
def test_offspring_law_d2_closed_form(lam):
    law = an.offspring_law_tree(2, lam)
    p1 = 2 / lam * math.log((lam + 2) ** 2 / (4 * (lam + 1)))
    p2 = 1 - math.log((lam + 2) ** 4 / (16 * (lam + 1))) / lam
    assert law[1] == pytest.approx(p1, abs=1e-10)
    assert law[2] == pytest.approx(p2, abs=1e-10)


def test_offspring_law_d2_at_six():
    assert an.offspring_law_tree(2, 6.0)[2] == pytest.approx(1 - math.log(4096 / 112) / 6, abs=1e-12)
    assert an.offspring_law_tree(2, 6.0)[2] == pytest.approx(0.400122, abs=1e-6)


@pytest.mark.parametrize("d", [2, 3, 4, 7, 12, 30])
@pytest.mark.parametrize("lam", [0.1, 1.0, 4.0, 25.0])
def test_offspring_law_invariants(d, lam):
    law = an.offspring_law_tree(d, lam)
    assert len(law) == d + 1
    assert all(0.0 <= p <= 1.0 for p in law.probs)
    assert math.fsum(law.probs) == pytest.approx(1.0, abs=1e-9)
    assert law[0] == pytest.approx(math.log1p(lam) / lam, abs=1e-9)
    # occupancy recursion over the survivor table gives the same law
    dp = occupancy_offspring(d, survivor_table(lam))
    assert np.max(np.abs(dp - np.array(law.probs))) < 1e-9


def test_offspring_mean_is_expected_occupancy():
    # E[#occupied] = d (1 - E[(1 - 1/d)^N]) = d (1 - h(1 - 1/d))
    for d, lam in ((2, 3.0), (5, 2.0), (9, 7.5)):
        u = lam / d
        assert an.offspring_law_tree(d, lam).mean() == pytest.approx(d * (1 - math.log1p(u) / u), abs=1e-12)


# -- tree extinction probabilities -----------------------------------------

def test_psi2_examples():
    assert an.psi_tree_closed(2, 4.0) == 1.0
    expected = math.log(7) / (6 + math.log(7) - 4 * math.log(4))
    assert an.psi_tree_closed(2, 6.0) == pytest.approx(expected, abs=1e-14)
    assert an.psi_tree_closed(2, 6.0) == pytest.approx(0.8106, abs=1e-4)


def test_psi3_in_unit_interval_and_matches_fixed_point():
    psi = an.psi_tree_closed(3, 5.0)
    assert 0.0 < psi < 1.0
    assert abs(psi - an.psi_tree_general(3, 5.0)) < 1e-8


def test_psi3_branches():
    # the root with "+" in front of the radical is negative; the other one is the extinction probability
    for lam in (3.5, 4.0, 6.0, 10.0, 50.0):
        plus, minus = an._psi3_candidates(lam)
        assert plus < 0.0
        law = an.offspring_law_tree(3, lam)
        assert abs(law.pgf(minus) - minus) < 1e-12
        assert an.psi_tree_closed(3, lam, branch="-") == an.psi_tree_closed(3, lam)
        assert an.psi_tree_closed(3, lam, branch="+") < 0.0
    with pytest.raises(DomainError):
        an.psi_tree_closed(3, 4.0, branch="x")


def test_psi3_subcritical():
    assert an.psi_tree_closed(3, 3.0) == 1.0
    assert an.psi_tree_general(3, 3.0) == 1.0


@pytest.mark.parametrize("d", [2, 3])
def test_closed_vs_general_grid(d):
    lam_d = an.critical_lambda(d)
    for lam in (lam_d + 0.5, lam_d + 2, lam_d + 10, 6.0, 8.0):
        assert abs(an.psi_tree_closed(d, lam) - an.psi_tree_general(d, lam)) < 1e-8


def test_closed_form_needs_small_degree():
    with pytest.raises(DomainError):
        an.psi_tree_closed(4, 6.0)


def test_general_examples():
    assert an.psi_tree_general(5, 2.0) == 1.0
    a, b = an.psi_tree_general(3, 10.0), an.psi_tree_general(3, 12.0)
    assert 0.0 < b <= a < 1.0


@pytest.mark.parametrize("d", [2, 3, 5, 10])
def test_threshold_consistency(d):
    lam_d = an.critical_lambda(d)
    assert an.psi_tree_general(d, lam_d - 0.05) == 1.0
    assert an.psi_tree_general(d, lam_d + 0.05) < 1.0


def test_general_near_threshold_is_close_to_one():
    lam = an.critical_lambda(2) + 1e-4
    psi = an.psi_tree_general(2, lam)
    assert 0.999 < psi < 1.0
    law = an.offspring_law_tree(2, lam)
    assert abs(law.pgf(psi) - psi) < 1e-12


@given(st.integers(2, 8), st.floats(0.5, 30.0))
@settings(max_examples=40, deadline=None)
def test_psi_monotone(d, lam):
    psi = an.psi_tree_general(d, lam)
    assert 0.0 <= psi <= 1.0
    assert an.psi_tree_general(d, lam * 1.2) <= psi + 1e-12
    assert an.psi_tree_general(d + 1, lam) <= psi + 1e-12


# -- tree mean extinction times ---------------------------------------------

def test_tau2_at_one():
    alpha, beta = math.log(2), 1 - math.log(81 / 32)
    expected = math.log(alpha / (alpha - beta)) / beta
    got = an.mean_tau_tree(2, 1.0)
    assert float(got) == pytest.approx(expected, abs=1e-12)
    assert float(got) == pytest.approx(1.522, abs=1e-3)


@pytest.mark.parametrize("d", [2, 3])
def test_tau_boundary_is_infinite(d):
    assert an.mean_tau_tree(d, an.critical_lambda(d)).is_infinite
    assert str(an.mean_tau_tree(d, an.critical_lambda(d))) == "inf"


@pytest.mark.parametrize("d", [2, 3])
def test_tau_grows_towards_boundary(d):
    lam_d = an.critical_lambda(d)
    vals = [float(an.mean_tau_tree(d, lam_d - gap)) for gap in (1.0, 0.1, 0.01, 0.001)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_tau_domain():
    with pytest.raises(DomainError):
        an.mean_tau_tree(2, 6.0)
    with pytest.raises(DomainError):
        an.mean_tau_tree(4, 1.0)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("lam", [0.05, 0.5, 1.0, 2.0])
def test_tau_parameter_identification(d, lam):
    p = an.offspring_law_tree(d, lam).probs
    params = an.tau_parameters(d, lam)
    assert params["alpha"] == pytest.approx(p[0], abs=1e-9)
    if d == 2:
        assert params["beta"] == pytest.approx(p[2], abs=1e-9)
    else:
        assert params["theta"] == pytest.approx(p[2] + p[3], abs=1e-9)
        assert params["gamma"] == pytest.approx(p[3], abs=1e-9)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("lam", [0.3, 1.0, 2.0])
def test_tau_tree_matches_integral(d, lam):
    law = an.offspring_law_tree(d, lam)
    assert float(an.mean_tau_tree(d, lam)) == pytest.approx(an.narayan_mean_time(law.pgf, law.mean()), abs=1e-8)
    with mpmath.workdps(30):
        ref = mpmath.quad(lambda y: (1 - y) / (law.pgf(float(y)) - y), [0, 0.5, 1])
    assert float(an.mean_tau_tree(d, lam)) == pytest.approx(float(ref), abs=1e-8)


def test_tau3_boundary_uses_nine_halves():
    # d = 3 is subcritical exactly when (9/2) ln(1 + lam/3) > lam
    lam3 = an.critical_lambda(3)
    assert 4.5 * math.log1p(lam3 / 3) == pytest.approx(lam3, abs=1e-10)
    assert math.isfinite(float(an.mean_tau_tree(3, lam3 - 1e-6)))


# -- free dispersion --------------------------------------------------------

def test_psi_free_subcritical_is_exactly_one():
    for lam in (0.1, 1.0, 1.5, 1.9, 2.0):
        assert an.psi_free(lam) == 1.0


@pytest.mark.parametrize("lam", [2.001, 2.1, 2.5, 4.0, 10.0, 100.0])
def test_psi_free_residual(lam):
    psi = an.psi_free(lam)
    assert 0.0 < psi < 1.0
    assert abs(an.free_fixed_point_gap(lam, psi)) < 1e-10
    # smallest root: the gap is positive on the whole of [0, psi)
    for s in np.linspace(0.0, psi, 50, endpoint=False):
        assert an.free_fixed_point_gap(lam, s) > 0


def test_psi_free_agrees_with_pgf_fixed_point():
    from catlab.survivor_law import survivor_pgf
    psi = an.psi_free(4.0)
    assert survivor_pgf(4.0, psi) == pytest.approx(psi, abs=1e-10)


@given(st.floats(2.05, 200.0))
@settings(max_examples=40)
def test_psi_free_decreasing(lam):
    assert an.psi_free(lam * 1.05) < an.psi_free(lam)


@pytest.mark.parametrize("lam", [0.5, 1.0, 1.5, 1.9])
def test_tau_free_two_integrals(lam):
    assert float(an.mean_tau_free(lam)) == pytest.approx(an.mean_tau_free_narayan(lam), abs=1e-6)


def test_tau_free_values():
    assert float(an.mean_tau_free(1.0)) == pytest.approx(1.64300, abs=1e-5)


def test_tau_free_small_rate_limit():
    for lam in (1e-3, 1e-5):
        assert float(an.mean_tau_free(lam)) == pytest.approx(1 / (1 - lam / 2), abs=1e-3)
        assert float(an.mean_tau_free(lam)) == pytest.approx(1.0, abs=1e-3)


def test_tau_free_infinite_at_two():
    assert an.mean_tau_free(2.0).is_infinite
    with pytest.raises(DomainError):
        an.mean_tau_free(2.5)


def test_tau_free_diverges_by_cutoff_refinement():
    vals = [an.mean_tau_free_truncated(2.0, c) for c in (1e-2, 1e-4, 1e-6, 1e-8)]
    steps = np.diff(vals)
    # logarithmic growth: equal increments per two decades of cutoff
    assert np.all(steps > 3.0)
    assert np.ptp(steps) < 0.05


def test_free_integrand_limit():
    for lam in (0.5, 1.0, 1.9):
        assert an.free_time_integrand(lam, 0.0) == pytest.approx(1 / (1 - lam / 2))
        x = 1e-3
        direct = x * x / (lam * math.log1p(x) - x * (lam - x))
        assert an.free_time_integrand(lam, x) == pytest.approx(direct, rel=1e-6)


def test_narayan_rejects_supercritical():
    with pytest.raises(DomainError):
        an.narayan_mean_time(lambda s: s * s, 2.0)


# -- comparison models ---------------------------------------------------------

def test_geometric_examples():
    assert an.psi_geometric(1.0, 0.5) == pytest.approx(2 / 3, abs=1e-15)
    assert an.psi_geometric(0.1, 0.1) == 1.0
    assert an.psi_geometric(10.0, 0.5) == pytest.approx(0.0916666666, abs=1e-9)


def test_binomial_examples():
    assert an.psi_binomial(3.0, 0.5) == pytest.approx(1 / 3, abs=1e-15)
    assert an.psi_binomial(1.0, 0.25) == 1.0
    assert an.psi_binomial(10.0, 0.25) == pytest.approx(0.3, abs=1e-15)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_p_validation(p):
    with pytest.raises(DomainError):
        an.psi_geometric(1.0, p)
    with pytest.raises(DomainError):
        an.psi_binomial(1.0, p)


def test_crossover():
    lam = an.crossover_lambda(0.25)
    assert 10.57 <= lam <= 10.59
    with pytest.raises(DomainError):
        an.crossover_lambda(0.34)
    lam = an.crossover_lambda(0.30)
    assert lam > 2
    assert abs(an.psi_free(lam) - an.psi_binomial(lam, 0.30)) < 1e-8


def test_uniform_vs_geometric_severity_threshold():
    lams = np.linspace(2.01, 40.0, 400)
    uniform = np.array([an.psi_free(x) for x in lams])
    for p in (0.2, 0.25, 0.5, 0.9):
        assert np.all(uniform >= [an.psi_geometric(x, p) for x in lams])
    # for small p the geometric catastrophe is the harsher one at moderate rates
    assert np.any(uniform < [an.psi_geometric(x, 0.1) for x in lams])


def test_table1_rows():
    rows = an.table1([2, 3])
    assert [d for d, _ in rows] == [2, 3]
