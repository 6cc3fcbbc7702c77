"""Where and why the fixed-strike call Rho changes sign.

Three tools:

* the zero set of the approximate call Rho in the (K/S0, (r-q)T) plane,
  via the balance function :func:`kappa_of`;
* a lower bound on the exact call Rho built from the lognormal geometric
  average, which is dominated by the arithmetic one path by path;
* the small-vol limits of the two terms of the Malliavin Rho representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import log_ndtr, ndtr

from .core import ConvergenceError, DomainError, MarketParams
from .eqvol import shape
from .greeks import rate_factor
from .pricing import avg_forward, expm1_ratio

_FIXED_POINT_TOL = 1e-14
_FIXED_POINT_ITER = 200


def kappa_balance(kappa: float, v: float, R: float) -> float:
    """(kappa/R) N(-ln(kappa)/v - v/2) - N(-ln(kappa)/v + v/2); zero on the locus.

    At v = 0 the balance degenerates to the step limit kappa/R - 1 (for
    kappa < 1, where both normal factors are one).
    """
    if v == 0.0:
        return kappa / R - 1.0
    lk = math.log(kappa)
    return kappa / R * ndtr(-lk / v - 0.5 * v) - ndtr(-lk / v + 0.5 * v)


def kappa_of(v: float, R: float) -> float:
    """Unique root kappa of the balance equation; tends to R as v -> 0."""
    if not v >= 0.0 or not math.isfinite(v):
        raise DomainError("v", f"must be non-negative, got {v}")
    if not R > 0.0:
        raise DomainError("R", f"must be positive, got {R}")
    if v == 0.0:
        return R

    # log form: ln(kappa/R) + ln N(-l/v - v/2) - ln N(-l/v + v/2), increasing in l
    def g(l: float) -> float:
        return l - math.log(R) + log_ndtr(-l / v - 0.5 * v) - log_ndtr(-l / v + 0.5 * v)

    lo, hi = math.log(R) - 1.0, math.log(R) + 1.0
    for _ in range(200):
        if g(lo) < 0.0:
            break
        lo -= 2.0 * (hi - lo)
    for _ in range(200):
        if g(hi) > 0.0:
            break
        hi += 2.0 * (hi - lo)
    else:
        raise ConvergenceError(f"no bracket for kappa at v={v}, R={R}")
    try:
        return math.exp(brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc


class LocusMode(str, Enum):
    FULL = "full"  # v(k) = sqrt(3) w * Sigma_LN(k) / sigma
    FLAT = "flat"  # v = w, i.e. Sigma_LN replaced by sigma / sqrt(3)


@dataclass(frozen=True)
class RhoZeroCurve:
    """Points (k, y) with k = K/S0, y = (r-q)T on the zero set of the call Rho."""

    w: float
    mode: LocusMode
    points: tuple[tuple[float, float], ...]

    @property
    def k(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def locus_point(w: float, y: float, mode: LocusMode | str = LocusMode.FULL) -> float:
    """Moneyness k on the zero set at carry ``y = (r-q)T`` and ``w = sigma sqrt(T)/sqrt(3)``."""
    mode = LocusMode(mode)
    if not w >= 0.0:
        raise DomainError("w", f"must be non-negative, got {w}")
    R = rate_factor(y)
    fwd = expm1_ratio(y)
    if mode is LocusMode.FLAT or w == 0.0:
        return kappa_of(w, R) * fwd
    total = math.sqrt(3.0) * w
    k = R * fwd
    for _ in range(_FIXED_POINT_ITER):
        v = total * shape(math.log(k))[0]
        k_new = kappa_of(v, R) * fwd
        if abs(k_new - k) <= _FIXED_POINT_TOL * k:
            return k_new
        k = k_new
    raise ConvergenceError(f"zero-locus fixed point did not settle at w={w}, y={y}")


def rho_zero_locus(
    w: float,
    y_range: tuple[float, float] = (-1.0, 1.0),
    n_points: int = 50,
    mode: LocusMode | str = LocusMode.FULL,
) -> RhoZeroCurve:
    mode = LocusMode(mode)
    ys = np.linspace(y_range[0], y_range[1], n_points)
    return RhoZeroCurve(w, mode, tuple((locus_point(w, float(y), mode), float(y)) for y in ys))


def locus_residual(k: float, w: float, y: float, mode: LocusMode | str = LocusMode.FULL) -> float:
    """Balance residual at a locus point, with v evaluated at that point."""
    mode = LocusMode(mode)
    kappa = k / expm1_ratio(y)
    if mode is LocusMode.FLAT or w == 0.0:
        v = w
    else:
        v = math.sqrt(3.0) * w * shape(math.log(k))[0]
    return kappa_balance(kappa, v, rate_factor(y))


# ---------------------------------------------------------------------------
# geometric-average bound


@dataclass(frozen=True)
class GeoMeanModel:
    """ln(G_T/S0) ~ Normal(mean, var) with mean = -sigma^2 T/4 + (r-q)T/2, var = sigma^2 T/3."""

    spot: float
    mean: float
    std: float

    @classmethod
    def of(cls, market: MarketParams, T: float) -> "GeoMeanModel":
        if not market.vol > 0.0:
            raise DomainError("vol", "geometric-average bound needs vol > 0")
        if not T > 0.0:
            raise DomainError("maturity", f"must be positive, got {T}")
        v2 = market.vol**2 * T
        return cls(market.spot, -0.25 * v2 + 0.5 * market.carry * T, math.sqrt(v2 / 3.0))

    def z0(self, K: float) -> float:
        return (math.log(K / self.spot) - self.mean) / self.std

    def tail(self, K: float) -> float:
        return float(ndtr(-self.z0(K)))


def geo_tail(market: MarketParams, T: float, K: float) -> float:
    """P(G_T > K)."""
    if not K > 0.0:
        raise DomainError("strike", f"must be positive, got {K}")
    return GeoMeanModel.of(market, T).tail(K)


def sup_K_geo(market: MarketParams, T: float) -> tuple[float, float]:
    """(K*, max) of K P(G_T > K) over K in (0, 10 S0], by golden-section search.

    A log-spaced scan supplies the bracket; the objective is unimodal.
    """
    model = GeoMeanModel.of(market, T)
    top = 10.0 * market.spot

    def neg(K: float) -> float:
        return -K * model.tail(K)

    grid = np.geomspace(1e-6 * market.spot, top, 401)
    vals = np.array([neg(K) for K in grid])
    i = int(np.argmin(vals))
    if i == len(grid) - 1:
        return top, -vals[-1]
    lo = grid[max(i - 1, 0)]
    res = minimize_scalar(neg, bracket=(lo, grid[i], grid[i + 1]), method="golden", tol=1e-12)
    return float(res.x), float(-res.fun)


def geo_sigma_threshold(T: float = 1.0, level: float = 0.5, spot: float = 100.0) -> float:
    """Volatility at which sup_K K P(G_T > K) falls to ``level * S0`` (r = q = 0)."""

    def gap(vol: float) -> float:
        return sup_K_geo(MarketParams(spot, 0.0, 0.0, vol), T)[1] / spot - level

    return float(brentq(gap, 1e-3, 5.0, xtol=1e-10))


# both closed forms lose ~eps/|y| to cancellation; 14 series terms reach
# double precision for |y| < 0.1
_SERIES_Y = 0.1
_SERIES_TERMS = 14


def _power_series(y: float, coef) -> float:
    total = 0.0
    for j in reversed(range(_SERIES_TERMS)):
        total = total * y + coef(j)
    return total


def expected_gap(market: MarketParams, T: float) -> float:
    """E[T A_T - B_T] = (S0/T)(e^{aT} - 1 - aT)/a^2 with a = r - q; S0 T/2 at a = 0."""
    y = market.carry * T
    if abs(y) < _SERIES_Y:
        ratio = _power_series(y, lambda j: 1.0 / math.factorial(j + 2))
    else:
        ratio = (math.expm1(y) - y) / (y * y)
    return market.spot * T * ratio


class BoundMode(str, Enum):
    GEO = "geo"
    MC = "mc"


def rho_lower_bound(market: MarketParams, K: float, T: float, mode: BoundMode | str = BoundMode.GEO, config=None):
    """Lower bound e^{-rT}(T K p - E[T A_T - B_T]) on the exact call Rho.

    ``mode="geo"`` uses p = P(G_T > K) and returns a float; ``mode="mc"``
    uses a simulated P(A_T > K) and returns a PathEstimate.
    """
    mode = BoundMode(mode)
    disc = math.exp(-market.rate * T)
    m = expected_gap(market, T)
    if mode is BoundMode.GEO:
        return disc * (T * K * geo_tail(market, T, K) - m)
    from .mc import PathEstimate, SimConfig, mc_probability_above

    p = mc_probability_above(market, T, K, config or SimConfig())
    scale = disc * T * K
    return PathEstimate(scale * p.mean - disc * m, scale * p.stderr, p.n_effective)


# ---------------------------------------------------------------------------
# Malliavin representation


@dataclass(frozen=True)
class MalliavinLimits:
    j1: float
    j2: float
    in_the_money: bool  # A(T) > K, the regime where the limits apply

    @property
    def j1_exceeds_j2(self) -> bool:
        return self.j1 > self.j2


def malliavin_limits(market: MarketParams, K: float, T: float) -> MalliavinLimits:
    """sigma -> 0 limits of J1 = e^{-rT}E[(A_T-K)^+ W_T/sigma] and J2 = e^{-rT}T E[(A_T-K)^+].

    Computed regardless of moneyness; ``in_the_money`` says whether they
    are the relevant limits.
    """
    disc = math.exp(-market.rate * T)
    y = market.carry * T
    if abs(y) < _SERIES_Y:
        ratio = _power_series(y, lambda j: (j + 1) / math.factorial(j + 2))
    else:
        ratio = (math.exp(y) * (y - 1.0) + 1.0) / (y * y)
    a_T = avg_forward(market, T)
    return MalliavinLimits(disc * market.spot * T * ratio, disc * (a_T - K) * T, a_T > K)
