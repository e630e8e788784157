import math

import pytest

from catlab.errors import BracketError, ConvergenceError
from catlab.numerics import adaptive_simpson, brent, first_sign_change, smallest_root_below_one


def test_brent_finds_cosine_root():
    assert brent(math.cos, 0.0, 3.0, 1e-14) == pytest.approx(math.pi / 2, abs=1e-13)


def test_brent_endpoint_root():
    assert brent(lambda x: x - 1.0, 1.0, 2.0, 1e-12) == 1.0


def test_brent_rejects_non_bracket():
    with pytest.raises(BracketError):
        brent(lambda x: x * x + 1, -1.0, 1.0, 1e-12)


def test_brent_iteration_cap():
    with pytest.raises(ConvergenceError):
        brent(lambda x: x ** 3 - 2, 0.0, 2.0, 1e-300, max_iters=3)


def test_first_sign_change_is_leftmost():
    f = lambda x: math.sin(10 * x)  # roots at k*pi/10
    a, b, fa, fb = first_sign_change(f, 0.05, 1.0, 0.01)
    assert a <= math.pi / 10 <= b and b - a <= 0.01 + 1e-12


def test_first_sign_change_none():
    assert first_sign_change(lambda x: 1.0 + x, 0.0, 1.0, 0.1) is None


def test_smallest_root_skips_trivial_root():
    # (s - 0.3)(s - 1) has roots 0.3 and 1
    assert smallest_root_below_one(lambda s: (s - 0.3) * (s - 1.0), 1e-3, 1e-14) == pytest.approx(0.3, abs=1e-13)


def test_smallest_root_near_one_needs_probe():
    r = 1.0 - 1e-5
    f = lambda s: (s - r) * (s - 1.0)
    assert smallest_root_below_one(f, 1e-3, 1e-15) is None
    assert smallest_root_below_one(f, 1e-3, 1e-15, supercritical=True) == pytest.approx(r, abs=1e-13)


@pytest.mark.parametrize("f,a,b,exact", [
    (math.exp, 0.0, 1.0, math.e - 1),
    (lambda x: 1 / (1 + x * x), 0.0, 1.0, math.pi / 4),
    (math.sqrt, 0.0, 1.0, 2 / 3),
    (lambda x: x ** 3, 2.0, 2.0, 0.0),
])
def test_simpson(f, a, b, exact):
    assert adaptive_simpson(f, a, b, 1e-12) == pytest.approx(exact, abs=1e-10)


def test_simpson_patched_endpoint():
    # sin(x)/x with its limit supplied at 0
    val = adaptive_simpson(lambda x: math.sin(x) / x, 0.0, 1.0, 1e-12, fa=1.0)
    assert val == pytest.approx(0.946083070367183, abs=1e-12)


def test_simpson_depth_cap():
    with pytest.raises(ConvergenceError):
        adaptive_simpson(lambda x: math.sin(1 / x) if x else 0.0, 0.0, 1.0, 1e-14, max_depth=5)
