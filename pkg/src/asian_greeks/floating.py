"""Floating-strike Asian options through the fixed/floating symmetry.

A floating call struck at ``kappa`` in a market (r, q) is worth the fixed
put struck at ``kappa * S0`` in the market (q, r), and vice versa. Every
Greek follows from the same map; rate and dividend sensitivities trade
places because the map swaps the two rates.
"""

from __future__ import annotations

from .core import DomainError, GreeksReport, MarketParams, Method, OptionKind, OptionSpec
from .greeks import SignReport, _tally, psi_fixed, rho_fixed, vega_fixed
from .pricing import price_fixed


def _check_floating(option: OptionSpec) -> None:
    if option.is_fixed:
        raise DomainError("style", "floating-strike formula called with a fixed-strike option")


def dual_fixed(market: MarketParams, option: OptionSpec) -> tuple[MarketParams, OptionSpec]:
    """The fixed-strike (market, option) pair whose price equals ``option``'s."""
    _check_floating(option)
    kind = OptionKind.PUT if option.is_call else OptionKind.CALL
    return market.swapped(), OptionSpec.fixed(kind, option.kappa * market.spot, option.maturity)


def price_floating(market: MarketParams, option: OptionSpec) -> float:
    return price_fixed(*dual_fixed(market, option))


def greeks_floating(market: MarketParams, option: OptionSpec) -> GreeksReport:
    """Analytic Greeks of a floating-strike option.

    The price is homogeneous of degree one in S0, so Delta = price / S0 and
    Gamma vanishes identically.
    """
    if not market.vol > 0.0:
        raise DomainError("vol", "analytic Greeks need vol > 0")
    dual_market, dual_option = dual_fixed(market, option)
    price = price_fixed(dual_market, dual_option)
    return GreeksReport(
        price=price,
        delta=price / market.spot,
        gamma=0.0,
        vega=vega_fixed(dual_market, dual_option),
        rho=psi_fixed(dual_market, dual_option),
        psi=rho_fixed(dual_market, dual_option),
        method=Method.ANALYTIC,
    )


def sign_suite_floating(grid) -> SignReport:
    """Floating-strike sign table on a grid of (market, T, kappa) points.

    Delta_call > 0, Delta_put > 0, Gamma = 0, Vega > 0, Rho_call > 0,
    Rho_put < 0, Psi_call < 0; Psi_put should take both signs.
    """
    report = SignReport(len(grid))
    pos = neg = False
    for market, T, kappa in grid:
        c = greeks_floating(market, OptionSpec.floating("call", kappa, T))
        p = greeks_floating(market, OptionSpec.floating("put", kappa, T))
        _tally(report, "delta_call > 0", c.delta > 0)
        _tally(report, "delta_put > 0", p.delta > 0)
        _tally(report, "gamma == 0", c.gamma == 0.0 and p.gamma == 0.0)
        _tally(report, "vega > 0", c.vega > 0 and p.vega > 0)
        _tally(report, "rho_call > 0", c.rho > 0)
        _tally(report, "rho_put < 0", p.rho < 0)
        _tally(report, "psi_call < 0", c.psi < 0)
        pos |= p.psi > 0
        neg |= p.psi < 0
    report.both_signs["psi_put"] = pos and neg
    return report
