import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asian_greeks import (
    DomainError,
    MarketParams,
    OptionSpec,
    delta_fixed,
    gamma_fixed,
    greeks_fixed,
    price_fixed,
    psi_fixed,
    rho_fixed,
    sign_suite_fixed,
    validated_grid,
    vega_fixed,
)
from asian_greeks.greeks import GRID_BOX, rate_factor, rho_parity_factor
from asian_greeks.pricing import avg_forward, expm1_ratio

from conftest import assert_rel
from oracles import FD_RESOLUTION, fd_greeks_of_price, mp_fd_greeks, natural_scales, richardson_first

GREEKS = ("delta", "gamma", "vega", "rho", "psi")


def analytic(market, option):
    return {
        "delta": delta_fixed(market, option),
        "gamma": gamma_fixed(market, option, exact=True),
        "vega": vega_fixed(market, option),
        "rho": rho_fixed(market, option),
        "psi": psi_fixed(market, option),
    }


def call(K, T):
    return OptionSpec.fixed("call", K, T)


def put(K, T):
    return OptionSpec.fixed("put", K, T)


# benchmark scenario ----------------------------------------------------------


@pytest.mark.parametrize(
    "spot, greek, want, tol",
    [
        (100, "delta", 0.5978, 5e-5),
        (90, "delta", 0.2250, 5e-5),
        (100, "gamma", 0.03694, 5e-5),
        (105, "gamma", 0.02730, 5e-5),
        (100, "vega", 15.2009, 5e-4),
        (100, "rho", 12.5415, 5e-4),
    ],
)
def test_scenario_values(scenario1, spot, greek, want, tol):
    report = greeks_fixed(scenario1.replace(spot=float(spot)), call(100.0, 0.5))
    assert getattr(report, greek) == pytest.approx(want, abs=tol)


def test_atm_vega_low_vol():
    m = MarketParams(100.0, 0.05, 0.0, 0.1)
    assert vega_fixed(m, call(100.0, 1.0)) == pytest.approx(20.1767, abs=5e-4)


# rate functions ----------------------------------------------------------------


def test_rate_factor_at_zero():
    assert rate_factor(0.0) == 0.5
    slope = richardson_first(rate_factor, 0.0, 1e-2, levels=3)
    assert slope == pytest.approx(-1.0 / 12.0, rel=1e-9)
    assert rho_parity_factor(0.0) == -0.5


@pytest.mark.parametrize("x", [-1e-4, 1e-4, -3e-3, 1e-7, 0.0999, -0.1, 0.5, -2.0])
def test_rate_functions_against_mpmath(x):
    with mp.workdps(40):
        y = mp.mpf(x)
        closed = 1 + 1 / y - 1 / (1 - mp.exp(-y))
        closed_f = (1 - mp.exp(y)) / (y * y) + 1 / y
    assert rate_factor(x) == pytest.approx(float(closed), rel=1e-14)
    assert rho_parity_factor(x) == pytest.approx(float(closed_f), rel=1e-14)


def test_rate_factor_relates_forward_derivative():
    """dA/dr = T A (1 - R(cT)) with R from the rate factor."""
    m, T = MarketParams(100.0, 0.07, 0.02, 0.3), 1.5
    dA = richardson_first(lambda r: avg_forward(m.replace(rate=r), T), m.rate, 1e-2, levels=3)
    assert_rel(dA, T * avg_forward(m, T) * (1 - rate_factor(m.carry * T)), 1e-11)


# parity relations ----------------------------------------------------------------


@pytest.mark.parametrize("point", validated_grid(60, seed=3))
def test_put_call_relations(point):
    m, T, k = point
    K = k * m.spot
    y = m.carry * T
    disc = math.exp(-m.rate * T)
    dd = delta_fixed(m, call(K, T)) - delta_fixed(m, put(K, T))
    assert abs(dd - disc * expm1_ratio(y)) <= 1e-12 * max(1.0, abs(dd))
    dr = rho_fixed(m, call(K, T)) - rho_fixed(m, put(K, T))
    want = T * disc * K + disc * m.spot * T * rho_parity_factor(y)
    assert abs(dr - want) <= 1e-12 * max(m.spot * T, abs(dr))
    assert gamma_fixed(m, call(K, T)) == gamma_fixed(m, put(K, T))
    assert vega_fixed(m, call(K, T)) == vega_fixed(m, put(K, T))


def test_delta_gap_at_equal_rates():
    m, T = MarketParams(100.0, 0.04, 0.04, 0.3), 0.75
    gap = delta_fixed(m, call(95.0, T)) - delta_fixed(m, put(95.0, T))
    assert gap == pytest.approx(math.exp(-0.04 * T), rel=1e-14)


# consistency with the price ------------------------------------------------------


@pytest.mark.parametrize("kind", ["call", "put"])
def test_greeks_match_double_precision_fd(grid200, kind):
    """Richardson FD of ``price_fixed`` itself, relative to max(|value|, resolution floor)."""
    worst = {}
    for m, T, k in grid200:
        o = OptionSpec.fixed(kind, k * m.spot, T)
        fd = fd_greeks_of_price(price_fixed, m, o)
        an, sc = analytic(m, o), natural_scales(m, o)
        for g in GREEKS:
            err = abs(an[g] - fd[g]) / max(abs(an[g]), FD_RESOLUTION * sc[g])
            worst[g] = max(worst.get(g, 0.0), err)
    assert all(v <= 1e-6 for v in worst.values()), worst


@pytest.mark.parametrize("point", validated_grid(24, seed=5))
def test_greeks_match_high_precision_fd(point):
    """Strict relative match against FD of a 40+ digit re-evaluation of the closed form."""
    m, T, k = point
    for kind in ("call", "put"):
        o = OptionSpec.fixed(kind, k * m.spot, T)
        fd, mp_price = mp_fd_greeks(m, o)
        assert abs(price_fixed(m, o) - mp_price) <= 1e-13 * max(mp_price, m.spot * 1e-3)
        an, sc = analytic(m, o), natural_scales(m, o)
        for g in GREEKS:
            assert abs(an[g] - fd[g]) <= 1e-6 * abs(fd[g]) + math.ulp(sc[g]), (g, an[g], fd[g])


def test_psi_is_the_dividend_derivative(scenario1):
    m = scenario1.replace(dividend=0.03)
    for o in (call(100.0, 0.5), put(110.0, 0.5)):
        fd = richardson_first(lambda q: price_fixed(m.replace(dividend=q), o), m.dividend, 1e-2, levels=3)
        assert_rel(psi_fixed(m, o), fd, 1e-9)


def test_printed_gamma_differs_from_exact(scenario1):
    """The published Gamma is close to, but not, the price's second derivative."""
    o = call(100.0, 0.5)
    printed, exact = gamma_fixed(scenario1, o), gamma_fixed(scenario1, o, exact=True)
    assert 1e-4 < abs(printed / exact - 1.0) < 5e-2
    atm_ish = scenario1.replace(spot=100.0 * math.exp(-0.05 * 0.5 * 0.5))
    assert gamma_fixed(atm_ish, o) == pytest.approx(gamma_fixed(atm_ish, o, exact=True), rel=5e-2)


# signs -----------------------------------------------------------------------------


def test_sign_suite_on_validated_grid(grid200):
    report = sign_suite_fixed(grid200)
    assert report.ok, list(report.lines())
    assert report.both_signs["rho_call"]


def test_put_rho_negative_on_large_grid():
    grid = validated_grid(1000, seed=11)
    worst = max(rho_fixed(m, put(k * m.spot, T)) for m, T, k in grid)
    assert worst < 0.0


def test_call_rho_low_vol_itm_limit():
    m = MarketParams(150.0, 0.0, 0.0, 0.01)
    assert rho_fixed(m, call(100.0, 1.0)) == pytest.approx(1.0 * 100.0 - 150.0 * 1.0 / 2, abs=0.5)


def test_call_rho_negative_for_large_rate():
    m = MarketParams(150.0, 3.0, 0.0, 0.01)
    assert rho_fixed(m, call(100.0, 1.0)) < 0.0


@given(
    st.floats(*GRID_BOX["maturity"]),
    st.floats(*GRID_BOX["total_vol"]),
    st.floats(*GRID_BOX["rate_T"]),
    st.floats(*GRID_BOX["div_T"]),
    st.floats(math.log(0.5), math.log(2.0)),
)
def test_vega_positive(T, total, rT, qT, x):
    m = MarketParams(100.0, rT / T, qT / T, total / math.sqrt(T))
    assert vega_fixed(m, call(100.0 * math.exp(x), T)) > 0.0


# errors and report -----------------------------------------------------------------


@pytest.mark.parametrize("func", [delta_fixed, gamma_fixed, vega_fixed, rho_fixed, psi_fixed])
def test_zero_vol_rejected(func):
    with pytest.raises(DomainError):
        func(MarketParams(100.0, 0.05, 0.0, 0.0), call(100.0, 1.0))


def test_floating_option_rejected():
    with pytest.raises(DomainError):
        delta_fixed(MarketParams(100.0, 0.05, 0.0, 0.2), OptionSpec.floating("call", 1.0, 1.0))


def test_report_fields(scenario1):
    r = greeks_fixed(scenario1, call(100.0, 0.5), exact_gamma=True)
    assert r.price == price_fixed(scenario1, call(100.0, 0.5))
    assert r.gamma == gamma_fixed(scenario1, call(100.0, 0.5), exact=True)
    assert r.method.value == "analytic"


def test_validated_grid_respects_box():
    grid = validated_grid(300, seed=2)
    assert len(grid) == 300
    for m, T, k in grid:
        assert GRID_BOX["maturity"][0] <= T <= GRID_BOX["maturity"][1]
        assert GRID_BOX["total_vol"][0] - 1e-12 <= m.vol * math.sqrt(T) <= GRID_BOX["total_vol"][1] + 1e-12
        assert abs(m.rate * T) <= 0.2 + 1e-12 and abs(m.dividend * T) <= 0.2 + 1e-12
        assert 0.5 - 1e-12 <= k <= 2.0 + 1e-12
    assert validated_grid(50, seed=2) == validated_grid(50, seed=2)
    assert np.isfinite([m.vol for m, _, _ in grid]).all()
