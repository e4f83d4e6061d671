import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forkrate import many, numerics
from forkrate.errors import BracketEscape, NonFinite, NoSignChange
from forkrate.numerics import Bracket
from forkrate.params import ManyParams


def test_bracket_validation():
    with pytest.raises(ValueError):
        Bracket(1.0, 1.0)
    with pytest.raises(ValueError):
        Bracket(0.0, 1.0, tol_rel=0.0)
    assert Bracket(-1.0, 3.0).width == 4.0


@given(c=st.floats(-5, 5), s=st.floats(0.1, 10))
def test_golden_section_finds_parabola_vertex(c, s):
    res = numerics.minimize_convex_1d(lambda x: s * (x - c) ** 2 + 1.0, Bracket(-10, 10))
    assert res.converged
    assert abs(res.argmin - c) <= 1e-8 * max(1.0, abs(c)) * 10
    assert res.min_value == pytest.approx(1.0, abs=1e-12)


def test_golden_section_stays_in_bracket_for_edge_minimum():
    res = numerics.minimize_convex_1d(lambda x: x, Bracket(2.0, 5.0))
    assert 2.0 <= res.argmin < 2.0 + 1e-8


def test_non_finite_objective_raises():
    with pytest.raises(NonFinite):
        numerics.minimize_convex_1d(lambda x: math.nan, Bracket(0, 1))
    with pytest.raises(NonFinite):
        numerics.minimize_convex_1d(lambda x: math.exp(1e4 * x), Bracket(0, 1))


def test_sup_conjugate_of_gaussian_cumulant():
    # sup_theta {theta x - theta^2/2} = x^2/2
    for x in (-3.0, 0.0, 0.5, 4.0):
        assert numerics.sup_conjugate(lambda th: 0.5 * th * th, x) == pytest.approx(x * x / 2, abs=1e-10)


def test_sup_conjugate_doubles_bracket_once():
    # maximizer at theta = 15, outside [-10, 10] but inside the doubled bracket
    v = numerics.sup_conjugate(lambda th: 0.5 * th * th, 15.0, Bracket(-10, 10))
    assert v == pytest.approx(112.5, rel=1e-9)
    with pytest.raises(BracketEscape):
        numerics.sup_conjugate(lambda th: 0.5 * th * th, 35.0, Bracket(-10, 10))


def test_sup_conjugate_escapes_for_linear_cumulant():
    with pytest.raises(BracketEscape):
        numerics.sup_conjugate(lambda th: th, 2.0)


def test_root_solver():
    r = numerics.solve_bracketed_root(lambda x: x**3 - 2.0, Bracket(0.0, 2.0, 1e-12))
    assert r == pytest.approx(2 ** (1 / 3), rel=1e-12)
    assert numerics.solve_bracketed_root(lambda x: x, Bracket(0.0, 1.0)) == 0.0
    with pytest.raises(NoSignChange):
        numerics.solve_bracketed_root(lambda x: x * x + 1, Bracket(-1.0, 1.0))


def test_infimum_over_time_matches_dense_grid():
    # dense t-grid with step 1e-3 over [0.01, 100] as a brute-force oracle
    p = ManyParams(10, 12)
    conj = lambda x: many.conjugate_many_queue(x, p)[0]
    res = numerics.infimum_over_time(conj, 5.0)
    ts = np.arange(0.01, 100.0, 1e-3)
    # the grid only needs the basin; evaluate it near the optimum to keep it fast
    near = ts[np.abs(ts - res.argmin) < 0.5]
    grid_min = min(t * conj(5.0 / t) for t in near)
    assert res.boundary is None and res.converged
    assert abs(res.min_value - grid_min) <= 1e-6
    assert res.min_value <= grid_min + 1e-12


def test_refinement_never_worse_than_grid():
    p = ManyParams(30, 32)
    conj = lambda x: many.conjugate_many_queue(x, p)[0]
    ts, hs = numerics.time_profile(conj, 8.0)
    res = numerics.infimum_over_time(conj, 8.0)
    assert res.min_value <= hs.min() + 1e-12
    assert ts[0] == pytest.approx(1e-3) and ts[-1] == pytest.approx(4000.0)


def test_boundary_minimum_is_flagged():
    # h(t) = t rises and h(t) = 1/t falls across the whole bracket
    res = numerics.infimum_over_time(lambda x: 1.0, 1.0, Bracket(1.0, 10.0, 1e-8))
    assert res.boundary == "lower" and not res.converged
    res = numerics.infimum_over_time(lambda x: x * x, 1.0, Bracket(1.0, 10.0, 1e-8))
    assert res.boundary == "upper" and not res.converged


def test_infimum_needs_positive_threshold():
    with pytest.raises(ValueError):
        numerics.infimum_over_time(lambda x: x, 0.0)
