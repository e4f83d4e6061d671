import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from forkrate import iid, numerics
from forkrate.errors import DeltaOutOfRange, NegativeArgument, NonPositiveRate, Unstable
from forkrate.params import IidParams, Mode

rates = st.floats(0.05, 20.0)


def test_poisson_cumulant_and_conjugate():
    assert iid.cumulant_poisson_arrivals(math.log(2.0), 3.0) == pytest.approx(3.0)
    assert iid.conjugate_poisson(0.0, 2.5) == 2.5
    assert iid.conjugate_poisson(2.0, 2.0) == 0.0
    assert iid.conjugate_poisson(2.0 * math.e, 2.0) == pytest.approx(2.0)
    with pytest.raises(NegativeArgument):
        iid.conjugate_poisson(-1.0, 1.0)
    with pytest.raises(NonPositiveRate):
        iid.cumulant_poisson_arrivals(0.1, 0.0)


def test_conjugate_known_value():
    # (1, 2) at x = 1: psi = sqrt(9) = 3, so 3 - 3 + log(2) = log 2
    assert iid.conjugate_queue_increment(1.0, IidParams(1, 2)) == pytest.approx(math.log(2.0), abs=1e-15)


@given(lam=rates, gap=st.floats(0.0, 10.0))
def test_conjugate_is_zero_at_the_drift(lam, gap):
    p = IidParams(lam, lam + gap)
    assert abs(iid.conjugate_queue_increment(lam - p.mu, p)) <= 1e-12 * max(1.0, p.mu)


@given(lam=rates, mu=rates, x=st.floats(-30, 30), h=st.floats(0.01, 5))
def test_conjugate_is_convex(lam, mu, x, h):
    p = IidParams(lam, mu)
    f = lambda z: iid.conjugate_queue_increment(z, p)
    assert f(x) <= 0.5 * (f(x - h) + f(x + h)) + 1e-9 * max(1.0, abs(f(x)))


def test_conjugate_accurate_for_very_negative_x():
    p = IidParams(1.0, 2.0)
    num = numerics.sup_conjugate(lambda th: iid.cumulant_queue_increment(th, p), -40.0,
                                 numerics.Bracket(-50, 50, 1e-12))
    assert iid.conjugate_queue_increment(-40.0, p) == pytest.approx(num, rel=1e-9)


def test_rate_closed_form():
    r = iid.rate_iid(3.0, IidParams(1, 2))
    assert r.value == pytest.approx(3 * math.log(2))
    assert r.t_star == pytest.approx(3.0)
    assert r.y_star is None and r.mode is Mode.CLOSED_FORM


@given(q=st.floats(0.1, 20), lam=rates, gap=st.floats(0.05, 10))
def test_rate_increases_in_q_and_mu(q, lam, gap):
    p = IidParams(lam, lam + gap)
    base = iid.rate_iid(q, p).value
    assert iid.rate_iid(q * 1.5, p).value > base
    assert iid.rate_iid(q, IidParams(lam, lam + gap * 1.5)).value > base


def test_rate_errors():
    with pytest.raises(Unstable):
        iid.rate_iid(1.0, IidParams(2, 1))
    with pytest.raises(NegativeArgument):
        iid.rate_iid(0.0, IidParams(1, 2))


def test_forking_probability():
    p = IidParams(1, 2)
    assert iid.forking_probability_iid(3.0, p) == pytest.approx(0.125, rel=1e-15)
    assert iid.forking_probability_iid(0.0, p) == 1.0
    with pytest.raises(NegativeArgument):
        iid.forking_probability_iid(-1.0, p)


def test_design_values():
    assert iid.effective_omega(0.125, IidParams(1, 2)) == pytest.approx(3.0, rel=1e-15)
    assert iid.effective_omega(1.0, IidParams(1, 2)) == 0.0
    assert iid.effective_mu(1.0, 3.0, 5.0) == 3.0
    assert iid.effective_mu(math.exp(-3), 1.0, 3.0) == pytest.approx(math.e, rel=1e-15)


@given(delta=st.floats(1e-12, 0.999), lam=rates, gap=st.floats(0.01, 10))
def test_design_roundtrip(delta, lam, gap):
    p = IidParams(lam, lam + gap)
    omega = iid.effective_omega(delta, p)
    assert iid.forking_probability_iid(omega, p) == pytest.approx(delta, rel=1e-9)
    assert iid.effective_mu(delta, lam, omega) == pytest.approx(p.mu, rel=1e-9)


@pytest.mark.parametrize("delta", [0.0, -0.1, 1.5])
def test_design_rejects_delta(delta):
    with pytest.raises(DeltaOutOfRange):
        iid.effective_omega(delta, IidParams(1, 2))
    with pytest.raises(DeltaOutOfRange):
        iid.effective_mu(delta, 1.0, 2.0)


def test_effective_mu_errors():
    with pytest.raises(NonPositiveRate):
        iid.effective_mu(0.5, 0.0, 2.0)
    with pytest.raises(NegativeArgument):
        iid.effective_mu(0.5, 1.0, 0.0)
