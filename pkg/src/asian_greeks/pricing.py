"""Short-maturity approximate prices of fixed-strike Asian options."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DomainError, MarketParams, OptionSpec
from .eqvol import sigma_ln

_SQRT1_2 = math.sqrt(0.5)
_DEEP_WING = 20.0


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x * _SQRT1_2)


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def expm1_ratio(y: float) -> float:
    """(e^y - 1)/y, continuous at y = 0."""
    if abs(y) < 1e-6:
        return 1.0 + y * (0.5 + y * (1.0 / 6.0 + y / 24.0))
    return math.expm1(y) / y


def avg_forward(market: MarketParams, maturity: float) -> float:
    """Forward of the continuous arithmetic average, E[A_T]."""
    if not maturity > 0.0:
        raise DomainError("maturity", f"must be positive, got {maturity}")
    return market.spot * expm1_ratio(market.carry * maturity)


@dataclass(frozen=True)
class PricingInputs:
    a_T: float
    d1: float
    d2: float
    discount: float
    total_vol: float
    log_moneyness: float


def pricing_inputs(market: MarketParams, strike: float, maturity: float) -> PricingInputs:
    """d1, d2 and friends of the Black-Scholes-like Asian formula.

    ``total_vol == 0`` (zero vol, or the far ITM wing where the equivalent
    vol underflows) leaves d1 = d2 = +/-inf according to moneyness of the
    average forward.
    """
    a = avg_forward(market, maturity)
    disc = math.exp(-market.rate * maturity)
    x = math.log(strike / market.spot)
    v = sigma_ln(strike / market.spot, market.vol) * math.sqrt(maturity)
    lm = math.log(a / strike)
    if v <= 0.0 or x < -_DEEP_WING:
        d = math.inf if lm > 0 else (-math.inf if lm < 0 else 0.0)
        return PricingInputs(a, d, d, disc, 0.0, x)
    d1 = lm / v + 0.5 * v
    return PricingInputs(a, d1, d1 - v, disc, v, x)


def _check_fixed(option: OptionSpec) -> None:
    if not option.is_fixed:
        raise DomainError("style", "fixed-strike formula called with a floating-strike option")


def price_fixed(market: MarketParams, option: OptionSpec) -> float:
    """Approximate price of a fixed-strike Asian call or put.

    Degenerate inputs (zero total vol, deep ITM wing) return the discounted
    intrinsic value on the average forward.
    """
    _check_fixed(option)
    K = option.strike
    p = pricing_inputs(market, K, option.maturity)
    if p.total_vol == 0.0:
        gap = p.a_T - K
        return p.discount * max(gap if option.is_call else -gap, 0.0)
    if option.is_call:
        value = p.discount * (p.a_T * norm_cdf(p.d1) - K * norm_cdf(p.d2))
    else:
        value = p.discount * (K * norm_cdf(-p.d2) - p.a_T * norm_cdf(-p.d1))
    return max(value, 0.0)


def parity_gap(market: MarketParams, strike: float, maturity: float) -> float:
    """Model-free call minus put: e^{-rT} (A(T) - K)."""
    return math.exp(-market.rate * maturity) * (avg_forward(market, maturity) - strike)
