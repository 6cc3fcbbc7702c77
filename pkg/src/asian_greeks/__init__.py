"""Short-maturity pricing and Greeks of continuously averaged Asian options."""

from .core import (
    ConvergenceError,
    DomainError,
    GreeksReport,
    MarketParams,
    Method,
    OptionKind,
    OptionSpec,
    ResourceError,
    StrikeStyle,
)
from .eqvol import j_bs, sigma_ln, sigma_ln_derivs, solve_beta, solve_xi
from .floating import greeks_floating, price_floating, sign_suite_floating
from .greeks import (
    delta_fixed,
    gamma_fixed,
    greeks_fixed,
    psi_fixed,
    rho_fixed,
    sign_suite_fixed,
    validated_grid,
    vega_fixed,
)
from .pricing import avg_forward, parity_gap, price_fixed

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "GreeksReport",
    "MarketParams",
    "Method",
    "OptionKind",
    "OptionSpec",
    "ResourceError",
    "StrikeStyle",
    "avg_forward",
    "delta_fixed",
    "gamma_fixed",
    "greeks_fixed",
    "greeks_floating",
    "j_bs",
    "parity_gap",
    "price_fixed",
    "price_floating",
    "psi_fixed",
    "rho_fixed",
    "sigma_ln",
    "sigma_ln_derivs",
    "sign_suite_fixed",
    "sign_suite_floating",
    "solve_beta",
    "solve_xi",
    "validated_grid",
    "vega_fixed",
]
