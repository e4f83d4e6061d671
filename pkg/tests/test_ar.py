import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forkrate import ar, many, numerics
from forkrate.errors import (
    DomainError,
    Infeasible,
    NegativeArgument,
    NegativeDiscriminant,
    NonPositiveRate,
    Unstable,
)
from forkrate.params import ArParams, ManyParams, Mode


def _theta_star(p: ArParams) -> float:
    """Positive root of the increment cumulant: the rate per unit threshold."""
    f = lambda th: ar.cumulant_ar_increment(th, p)
    return numerics.solve_bracketed_root(f, numerics.Bracket(1e-9, 50.0, 1e-15))


def _grid_min_gamma(x, p, step=1e-4, y_max=200.0):
    ys = np.arange(x + step, y_max, step)
    c = (1 - p.xi) / (1 + p.xi)
    s = ys - x
    g = c * (ys - p.lambda_t) ** 2 / 2 + s * np.log(s / p.mu_t) + p.mu_t - s
    return float(g.min())


def test_arrival_cumulant_and_conjugate():
    p = ArParams(10, 12, 0.5)
    # variance factor (1 + xi)/(1 - xi) = 3
    assert ar.cumulant_ar_arrivals(2.0, p) == pytest.approx(20 + 6)
    assert ar.conjugate_ar_arrivals(13.0, p) == pytest.approx(9 / 6)


def test_gamma_domain_and_convexity():
    p = ArParams(10, 12, -0.4)
    with pytest.raises(DomainError):
        ar.gamma_ar(2.0, 2.0, p)
    for y in np.linspace(2.1, 40, 30):
        g = lambda z: ar.gamma_ar(z, 2.0, p)
        assert g(y) <= 0.5 * (g(y - 0.05) + g(y + 0.05)) + 1e-9


def test_taylor_roots_known_value():
    y1, y2 = ar.taylor_roots_ar(5.0, ArParams(10, 12, 0.0))
    assert y1 == pytest.approx(173 - 12 * math.sqrt(183), rel=1e-14)
    assert y1 == pytest.approx(10.667008898375798, rel=1e-14)
    assert y2 == pytest.approx(335.3329911016242, rel=1e-14)


@given(lam=st.floats(1, 50), gap=st.floats(0.1, 10), xi=st.floats(-0.9, 0.9), x=st.floats(0.1, 20))
def test_taylor_roots_zero_the_expanded_condition(lam, gap, xi, x):
    p = ArParams(lam, lam + gap, xi)
    try:
        roots = ar.taylor_roots_ar(x, p)
    except NegativeDiscriminant:
        return
    for y in roots:
        scale = max(1.0, abs(y), p.mu_t)
        assert abs(ar.taylor_condition_ar(y, x, p)) <= 1e-9 * scale


def test_taylor_roots_at_zero_xi_equal_many_roots():
    for x in (0.5, 3.0, 9.0):
        assert ar.taylor_roots_ar(x, ArParams(10, 12, 0.0)) == pytest.approx(
            many.taylor_roots_many(x, ManyParams(10, 12)), rel=1e-14)


def test_negative_discriminant_reported():
    with pytest.raises(NegativeDiscriminant):
        ar.taylor_roots_ar(-100.0, ArParams(10, 12, 0.0))


def test_exact_conjugate_against_dense_grid():
    p = ArParams(10, 12, 0.5)
    value, y = ar.conjugate_ar_queue(2.0, p)
    assert value == pytest.approx(0.5751857100779567, abs=1e-12)
    assert y == pytest.approx(10.897431896822619, rel=1e-10)
    assert abs(value - _grid_min_gamma(2.0, p)) <= 1e-6


def test_exact_conjugate_matches_golden_section():
    p = ArParams(10, 12, -0.2)
    res = numerics.minimize_convex_1d(lambda y: ar.gamma_ar(y, 2.0, p),
                                      numerics.Bracket(2.0 + 1e-12, 202.0))
    value, y = ar.conjugate_ar_queue(2.0, p)
    assert value == pytest.approx(res.min_value, abs=1e-12)
    assert y == pytest.approx(res.argmin, rel=1e-6)


def test_exact_minimizer_satisfies_first_order_condition():
    for xi in (-0.8, -0.2, 0.0, 0.5, 0.9):
        p = ArParams(30, 32, xi)
        for x in (0.01, 1.0, 10.0, 29.0, 31.0):
            _, y = ar.conjugate_ar_queue(x, p)
            assert y > x
            assert abs(ar.stationarity_ar(y, x, p)) <= 1e-8


def test_exact_conjugate_far_above_the_mean():
    # the offset y - x underflows here, but the value must stay accurate
    p = ArParams(30, 32, -0.8)
    for x in (100.0, 5000.0):
        value, y = ar.conjugate_ar_queue(x, p)
        assert y >= x
        assert value == pytest.approx(9 * (x - 30) ** 2 / 2 + 32, rel=1e-12)


def test_taylor_mode_gap_is_reported():
    p = ArParams(10, 12, -0.2)
    exact, y_exact = ar.conjugate_ar_queue(2.0, p, Mode.EXACT)
    taylor, y_taylor = ar.conjugate_ar_queue(2.0, p, "taylor")
    assert exact == pytest.approx(0.7056540131259759, abs=1e-12)
    assert taylor == pytest.approx(0.7057099367344133, abs=1e-12)
    # the Taylor point is feasible but not the minimizer
    assert taylor >= exact and y_taylor != y_exact


def test_rate_matches_cumulant_root_oracle():
    for p, b in [(ArParams(10, 12, -0.2), 5.0), (ArParams(30, 32, 0.8), 10.0),
                 (ArParams(30, 35, 0.3), 7.0), (ArParams(20, 20.5, -0.6), 3.0)]:
        r = ar.rate_ar(b, p)
        assert r.interior and r.mode is Mode.EXACT
        assert r.value == pytest.approx(b * _theta_star(p), rel=1e-9)


def test_rate_regression_baselines():
    r = ar.rate_ar(5.0, ArParams(10, 12, -0.2))
    assert r.value == pytest.approx(1.758152350798422, rel=1e-10)
    assert r.t_star == pytest.approx(2.79027, rel=1e-4)
    assert ar.rate_ar(5.0, ArParams(30, 32, -0.2)).value == pytest.approx(0.6380006204339589, rel=1e-10)


def test_rate_taylor_mode_is_close_to_exact():
    p = ArParams(30, 32, -0.2)
    exact = ar.rate_ar(5.0, p).value
    taylor = ar.rate_ar(5.0, p, Mode.TAYLOR)
    assert taylor.mode is Mode.TAYLOR
    assert taylor.value == pytest.approx(0.6380009575, rel=1e-8)
    assert abs(taylor.value - exact) < 1e-5


def test_rate_increases_with_b():
    p = ArParams(10, 12, -0.2)
    assert ar.rate_ar(10.0 - 1e-9, ArParams(30, 32, -0.2)).value > ar.rate_ar(5.0, ArParams(30, 32, -0.2)).value
    assert ar.rate_ar(9.0, p).value > ar.rate_ar(5.0, p).value


def test_objective_at_t_star_equals_rate():
    p = ArParams(30, 32, 0.8)
    r = ar.rate_ar(5.0, p)
    value, y = ar.objective_ar(r.t_star, 5.0, p)
    assert value == pytest.approx(r.value, rel=1e-12)
    assert y == pytest.approx(r.y_star, rel=1e-12)
    with pytest.raises(NegativeArgument):
        ar.objective_ar(0.0, 5.0, p)


def test_rate_errors():
    with pytest.raises(Infeasible):
        ar.rate_ar(10.0, ArParams(10, 12, 0.0))
    with pytest.raises(NegativeArgument):
        ar.rate_ar(-1.0, ArParams(10, 12, 0.0))
    with pytest.raises(Unstable):
        ar.rate_ar(1.0, ArParams(12, 10, 0.0))
    with pytest.raises(NonPositiveRate):
        ar.rate_ar(1.0, ArParams(10, 12, 0.0, 0.0))
