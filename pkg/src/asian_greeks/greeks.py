"""Analytic sensitivities of the short-maturity fixed-strike approximation.

Gamma comes in two flavours. ``gamma_fixed`` evaluates the published
closed form, which reproduces the benchmark tables. That expression is not
the exact second S0-derivative of :func:`~asian_greeks.pricing.price_fixed`
(it differs at the 1% level); ``gamma_fixed(..., exact=True)`` returns the
exact derivative, which is what finite differences of the price converge to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, GreeksReport, MarketParams, Method, OptionSpec
from .eqvol import shape
from .pricing import (
    PricingInputs,
    _check_fixed,
    expm1_ratio,
    norm_cdf,
    norm_pdf,
    price_fixed,
    pricing_inputs,
)


# closed forms below lose ~eps/|x| to cancellation; the series are exact to
# double precision on |x| < 0.1
_SERIES_X = 0.1
# B_{2m}/(2m)! for m = 1..6, so R(x) = 1/2 - sum_m c_m x^{2m-1}
_R_COEFFS = (1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160, -691 / 1307674368000)


def rate_factor(x: float) -> float:
    """R(x) = 1 + 1/x - 1/(1 - e^{-x}), with R(0) = 1/2."""
    if abs(x) < _SERIES_X:
        x2 = x * x
        odd = 0.0
        for c in reversed(_R_COEFFS):
            odd = odd * x2 + c
        return 0.5 - x * odd
    return 1.0 + 1.0 / x + 1.0 / math.expm1(-x)


def rho_parity_factor(x: float) -> float:
    """f(x) = (1 - e^x)/x^2 + 1/x, with f(0) = -1/2."""
    if abs(x) < _SERIES_X:
        total = 0.0
        for j in reversed(range(14)):
            total = total * x + 1.0 / math.factorial(j + 2)
        return -total
    return (x - math.expm1(x)) / (x * x)


@dataclass(frozen=True)
class _Terms:
    p: PricingInputs
    sig: float  # Sigma_LN
    dsig: float  # d Sigma_LN / d log k
    d2sig: float


def _terms(market: MarketParams, option: OptionSpec) -> _Terms:
    _check_fixed(option)
    if not market.vol > 0.0:
        raise DomainError("vol", "analytic Greeks need vol > 0")
    p = pricing_inputs(market, option.strike, option.maturity)
    s, s1, s2 = shape(p.log_moneyness)
    v = market.vol
    return _Terms(p, v * s, v * s1, v * s2)


def delta_fixed(market: MarketParams, option: OptionSpec) -> float:
    t = _terms(market, option)
    p, T = t.p, option.maturity
    a_ratio = p.a_T / market.spot
    skew = math.sqrt(T) * norm_pdf(p.d1) * t.dsig
    if option.is_call:
        return p.discount * a_ratio * (norm_cdf(p.d1) - skew)
    # equals call - e^{-rT}(e^{y}-1)/y; written without the cancellation
    return -p.discount * a_ratio * (norm_cdf(-p.d1) + skew)


def gamma_fixed(market: MarketParams, option: OptionSpec, exact: bool = False) -> float:
    """Gamma, identical for calls and puts.

    With ``exact=False`` this is the published closed form; ``exact=True``
    gives the true second derivative of the approximate price.
    """
    t = _terms(market, option)
    p, T, S0 = t.p, option.maturity, market.spot
    if p.total_vol == 0.0:
        return 0.0
    lead = p.discount * (p.a_T / S0) * norm_pdf(p.d1) / (p.total_vol * S0)
    skew = t.dsig / t.sig
    curv = t.sig * t.d2sig * T
    if exact:
        lm = math.log(p.a_T / option.strike)
        bracket = (1.0 + skew * lm) ** 2 - 0.25 * (t.sig * t.dsig * T) ** 2 + curv
    else:
        bracket = (1.0 + math.sqrt(T) * t.dsig) * (1.0 + skew * math.log(p.a_T / S0)) + curv
    return lead * bracket


def vega_fixed(market: MarketParams, option: OptionSpec) -> float:
    t = _terms(market, option)
    p = t.p
    return p.discount * p.a_T * p.total_vol * norm_pdf(p.d1) / market.vol


def rho_fixed(market: MarketParams, option: OptionSpec) -> float:
    t = _terms(market, option)
    p, T, K = t.p, option.maturity, option.strike
    R = rate_factor(market.carry * T)
    if option.is_call:
        return p.discount * T * (K * norm_cdf(p.d2) - p.a_T * norm_cdf(p.d1) * R)
    # parity form Rho_C - T e^{-rT} K - e^{-rT} S0 T f(y), using A R = -S0 f
    return p.discount * T * (p.a_T * R * norm_cdf(-p.d1) - K * norm_cdf(-p.d2))


def psi_fixed(market: MarketParams, option: OptionSpec) -> float:
    """Sensitivity to the dividend yield q.

    Only the average forward depends on q, and dA/dq = -T A (1 - R), so
    Psi_C = -e^{-rT} T A (1 - R) N(d1) and Psi_P = e^{-rT} T A (1 - R) N(-d1).
    """
    t = _terms(market, option)
    p, T = t.p, option.maturity
    w = p.discount * T * p.a_T * (1.0 - rate_factor(market.carry * T))
    if option.is_call:
        return -w * norm_cdf(p.d1)
    return w * norm_cdf(-p.d1)


def greeks_fixed(market: MarketParams, option: OptionSpec, exact_gamma: bool = False) -> GreeksReport:
    return GreeksReport(
        price=price_fixed(market, option),
        delta=delta_fixed(market, option),
        gamma=gamma_fixed(market, option, exact=exact_gamma),
        vega=vega_fixed(market, option),
        rho=rho_fixed(market, option),
        psi=psi_fixed(market, option),
        method=Method.ANALYTIC,
    )


# ---------------------------------------------------------------------------
# sign analysis


GRID_BOX = {
    "maturity": (1.0 / 12.0, 2.0),
    "total_vol": (0.05, 0.5),  # sigma sqrt(T); the floor keeps N(-d) from underflowing
    "rate_T": (-0.2, 0.2),
    "div_T": (-0.2, 0.2),
    "moneyness": (0.5, 2.0),
}


def _grid_point(spot, T, total, rT, qT, k):
    return MarketParams(spot, rT / T, qT / T, total / math.sqrt(T)), T, k


def validated_grid(n: int, seed: int = 0, spot: float = 100.0, corners: bool = True):
    """Points (market, T, K/S0) inside the domain the formulas are trusted on.

    The 32 corners of :data:`GRID_BOX` come first (when ``corners``), the rest
    is uniform in each coordinate, log-uniform in moneyness.
    """
    box = GRID_BOX
    out = []
    if corners:
        for T in box["maturity"]:
            for total in box["total_vol"]:
                for rT in box["rate_T"]:
                    for qT in box["div_T"]:
                        for k in box["moneyness"]:
                            out.append(_grid_point(spot, T, total, rT, qT, k))
        out = out[:n]
    rng = np.random.default_rng(seed)
    lo_k, hi_k = (math.log(v) for v in box["moneyness"])
    while len(out) < n:
        T = float(rng.uniform(*box["maturity"]))
        total = float(rng.uniform(*box["total_vol"]))
        rT = float(rng.uniform(*box["rate_T"]))
        qT = float(rng.uniform(*box["div_T"]))
        k = math.exp(float(rng.uniform(lo_k, hi_k)))
        out.append(_grid_point(spot, T, total, rT, qT, k))
    return out


@dataclass
class SignReport:
    """Outcome of a sign-suite run: violation counts per claim, both-sign flags."""

    n_points: int
    violations: dict = field(default_factory=dict)
    both_signs: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v == 0 for v in self.violations.values()) and all(self.both_signs.values())

    def lines(self):
        for name, count in self.violations.items():
            yield f"{name}: {self.n_points - count}/{self.n_points} hold"
        for name, seen in self.both_signs.items():
            yield f"{name}: {'both signs seen' if seen else 'only one sign seen'}"


def _tally(report: SignReport, name: str, holds: bool) -> None:
    report.violations[name] = report.violations.get(name, 0) + (0 if holds else 1)


def sign_suite_fixed(grid) -> SignReport:
    """Check the fixed-strike sign table on ``grid`` of (market, T, k) points.

    Delta_call > 0, Delta_put < 0, Gamma > 0, Vega > 0, Rho_put < 0,
    Psi_call < 0, Psi_put > 0; Rho_call should take both signs.
    """
    report = SignReport(len(grid))
    pos = neg = False
    for market, T, k in grid:
        K = k * market.spot
        c, p = OptionSpec.fixed("call", K, T), OptionSpec.fixed("put", K, T)
        _tally(report, "delta_call > 0", delta_fixed(market, c) > 0)
        _tally(report, "delta_put < 0", delta_fixed(market, p) < 0)
        _tally(report, "gamma > 0", gamma_fixed(market, c) > 0)
        _tally(report, "vega > 0", vega_fixed(market, c) > 0)
        _tally(report, "rho_put < 0", rho_fixed(market, p) < 0)
        _tally(report, "psi_call < 0", psi_fixed(market, c) < 0)
        _tally(report, "psi_put > 0", psi_fixed(market, p) > 0)
        rc = rho_fixed(market, c)
        pos |= rc > 0
        neg |= rc < 0
    report.both_signs["rho_call"] = pos and neg
    return report
