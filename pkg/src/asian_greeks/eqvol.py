"""Short-maturity equivalent log-normal volatility of an Asian option.

For log-moneyness ``x = log(K/S0)`` the equivalent volatility is

    Sigma_LN(x)^2 = sigma^2 x^2 / (2 J(x))

with the rate function ``J`` written through the root ``beta`` of
``sinh(beta)/beta = K/S0`` (K >= S0) or ``xi`` of ``sin(2 xi)/(2 xi) = K/S0``
(K <= S0). Everything is linear in ``sigma``, so the work is done on the
shape ``s(x) = Sigma_LN / sigma`` and scaled at the end.

Near the money the closed form is 0/0; there the exact Taylor series of
``s`` is used instead (coefficients below, exact rationals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import ConvergenceError, DomainError

TOL_REL = 1e-12
MAX_ITER = 200

# s(x) * sqrt(3) = sum_i ATM_COEFFS[i] x^i; first four terms are the
# classic 1 + x/10 - 23x^2/2100 + x^3/3500.
ATM_COEFFS = (
    Fraction(1),
    Fraction(1, 10),
    Fraction(-23, 2100),
    Fraction(1, 3500),
    Fraction(9143, 48510000),
    Fraction(-2183, 52552500),
    Fraction(82111, 41385093750),
    Fraction(19733537, 18761242500000),
)
_C = tuple(float(c) for c in ATM_COEFFS)
# Truncation error of the 8-term series is ~3e-7 |x|^8: below 1e-16 here.
SERIES_CUTOFF = 0.05

_INV_SQRT3 = 1.0 / math.sqrt(3.0)
_HALF_PI = 0.5 * math.pi
# Below this moneyness the xi branch is parametrised by pi/2 - xi.
_XI_COMPLEMENT_BELOW = 0.1


@dataclass(frozen=True)
class EqVolPoint:
    """Equivalent volatility and its log-strike derivatives at one strike."""

    moneyness: float
    log_moneyness: float
    sigma_ln: float
    d_sigma: float
    d2_sigma: float
    root_name: str  # "beta" (k >= 1) or "xi" (k < 1)
    root: float
    rate_fn: float


# ---------------------------------------------------------------------------
# small stable helpers


def _series_sum(z2: float, first: float, ratio: Callable[[int], float]) -> float:
    """Sum first*prod(ratio) terms of an alternating/positive power series in z2."""
    term, total, n = first, first, 1
    while abs(term) > 1e-18 * abs(total):
        term *= z2 * ratio(n)
        total += term
        n += 1
    return total


def _sinhc_m1(b: float) -> float:
    """sinh(b)/b - 1 without cancellation."""
    if b < 0.5:
        return _series_sum(b * b, b * b / 6.0, lambda n: 1.0 / ((2 * n + 2) * (2 * n + 3)))
    return math.sinh(b) / b - 1.0


def _sinc_m1(z: float) -> float:
    """sin(z)/z - 1 without cancellation."""
    if z < 0.5:
        return _series_sum(z * z, -z * z / 6.0, lambda n: -1.0 / ((2 * n + 2) * (2 * n + 3)))
    return math.sin(z) / z - 1.0


def _log_sinhc(b: float) -> float:
    if b < 0.5:
        return math.log1p(_sinhc_m1(b))
    if b < 20.0:
        return math.log(math.sinh(b) / b)
    return b - math.log(2.0 * b) + math.log1p(-math.exp(-2.0 * b))


def _coth_minus_inv(b: float) -> float:
    """coth(b) - 1/b."""
    if b < 0.1:
        b2 = b * b
        return b * (1 / 3 - b2 * (1 / 45 - b2 * (2 / 945 - b2 * (1 / 4725 - b2 * 2 / 93555))))
    return 1.0 / math.tanh(b) - 1.0 / b


def _cot_minus_inv(z: float) -> float:
    """cot(z) - 1/z for 0 < z < pi."""
    if z < 0.1:
        z2 = z * z
        return -z * (1 / 3 + z2 * (1 / 45 + z2 * (2 / 945 + z2 * (1 / 4725 + z2 * 2 / 93555))))
    return 1.0 / math.tan(z) - 1.0 / z


def _sech2(a: float) -> float:
    if a > 350.0:
        return 0.0
    return 1.0 / math.cosh(a) ** 2


def _newton_bisect(f, lo, hi, x0, xtol, max_iter=MAX_ITER):
    """Root of monotone ``f`` (returning value, slope) on [lo, hi].

    Newton steps that leave the bracket or fail to shrink it fast enough are
    replaced by bisection. The bracket must straddle the root.
    """
    flo = f(lo)[0]
    x = min(max(x0, lo), hi)
    for _ in range(max_iter):
        fx, dfx = f(x)
        if fx == 0.0:
            return x
        if (fx < 0.0) == (flo < 0.0):
            lo, flo = x, fx
        else:
            hi = x
        step = fx / dfx if dfx != 0.0 and math.isfinite(dfx) else math.inf
        cand = x - step
        if not lo < cand < hi:
            cand = 0.5 * (lo + hi)
        if abs(cand - x) <= xtol * max(abs(cand), 1e-300) or hi - lo <= xtol * abs(hi):
            return cand
        x = cand
    raise ConvergenceError(f"root not found after {max_iter} iterations in [{lo}, {hi}]")


# ---------------------------------------------------------------------------
# roots


def _check_moneyness(k: float) -> float:
    k = float(k)
    if not (k > 0.0 and math.isfinite(k)):
        raise DomainError("moneyness", f"must be positive and finite, got {k}")
    return k


def _beta_from_x(x: float) -> float:
    if x == 0.0:
        return 0.0
    l2k = x + math.log(2.0)
    hi = max(5.0, l2k + math.log(l2k) + 2.0)
    x0 = math.sqrt(6.0 * x) if x < 1.0 else l2k + math.log(l2k)

    def f(b):
        if b == 0.0:
            return -x, 0.0
        return _log_sinhc(b) - x, _coth_minus_inv(b)

    return _newton_bisect(f, 0.0, hi, x0, 1e-15)


def solve_beta(k: float) -> float:
    """Root beta >= 0 of ``sinh(beta)/beta = k`` for moneyness k >= 1."""
    k = _check_moneyness(k)
    if k < 1.0:
        raise DomainError("moneyness", f"beta branch needs k >= 1, got {k}")
    return _beta_from_x(math.log(k))


def _xi_from_x(x: float) -> tuple[float, float]:
    """Return (xi, pi/2 - xi) for x = log k <= 0, each accurate in its own right."""
    if x == 0.0:
        return 0.0, _HALF_PI
    if x > math.log(_XI_COMPLEMENT_BELOW):
        def f(xi):
            if xi == 0.0:
                return -x, 0.0
            z = 2.0 * xi
            return math.log1p(_sinc_m1(z)) - x, 2.0 * _cot_minus_inv(z)

        xi = _newton_bisect(f, 0.0, _HALF_PI - 1e-12, math.sqrt(-1.5 * x), 1e-15)
        return xi, _HALF_PI - xi

    # eps = pi/2 - xi is small here; sin(2 xi) = sin(2 eps)
    def g(eps):
        s2 = math.sin(2.0 * eps)
        return (math.log(s2) - math.log(math.pi - 2.0 * eps) - x,
                2.0 * math.cos(2.0 * eps) / s2 + 2.0 / (math.pi - 2.0 * eps))

    k = math.exp(x)
    lo = 0.25 * math.pi * k if k > 0.0 else math.ldexp(1.0, -1070)
    eps = _newton_bisect(g, lo, _HALF_PI - 0.5, 0.5 * math.pi * k if k > 0.0 else lo, 1e-15)
    return _HALF_PI - eps, eps


def solve_xi(k: float) -> float:
    """Root xi in [0, pi/2) of ``sin(2 xi)/(2 xi) = k`` for 0 < k <= 1."""
    k = _check_moneyness(k)
    if k > 1.0:
        raise DomainError("moneyness", f"xi branch needs k <= 1, got {k}")
    return _xi_from_x(math.log(k))[0]


# ---------------------------------------------------------------------------
# parametric branch quantities: x(p), J(p) and their first two p-derivatives


def _beta_terms(b: float):
    h = 0.5 * b
    th, se = math.tanh(h), _sech2(h)
    xp = _coth_minus_inv(b)
    xpp = 1.0 / (b * b) - (0.0 if b > 350.0 else 1.0 / math.sinh(b) ** 2)
    J = 0.5 * b * b - b * th
    Jp = b - th - h * se
    Jpp = 1.0 - se + h * th * se
    return _log_sinhc(b), xp, xpp, J, Jp, Jpp


def _xi_terms(xi: float, eps: float):
    if eps < xi:
        s2, c2 = math.sin(2.0 * eps), -math.cos(2.0 * eps)
        tan_xi = 1.0 / math.tan(eps)
        sec2 = 1.0 / math.sin(eps) ** 2
    else:
        s2, c2 = math.sin(2.0 * xi), math.cos(2.0 * xi)
        tan_xi = math.tan(xi)
        sec2 = 1.0 / math.cos(xi) ** 2
    x = math.log(s2) - math.log(2.0 * xi)
    xp = 2.0 * c2 / s2 - 1.0 / xi
    xpp = -4.0 / (s2 * s2) + 1.0 / (xi * xi)
    J = 2.0 * xi * (tan_xi - xi)
    Jp = 2.0 * tan_xi + 2.0 * xi * sec2 - 4.0 * xi
    Jpp = 4.0 * sec2 + 4.0 * xi * sec2 * tan_xi - 4.0
    return x, xp, xpp, J, Jp, Jpp


def _shape_closed(x: float) -> tuple[float, float, float, float, float]:
    """(s, ds/dx, d2s/dx2, root, J) from the closed form; |x| must not be tiny."""
    if x > 0.0:
        root = _beta_from_x(x)
        xv, xp, xpp, J, Jp, Jpp = _beta_terms(root)
    else:
        root, eps = _xi_from_x(x)
        xv, xp, xpp, J, Jp, Jpp = _xi_terms(root, eps)
    # use the target x rather than the recomputed one; they agree to ~1e-15
    s = abs(x) / math.sqrt(2.0 * J)
    lp = xp / x - 0.5 * Jp / J
    lpp = xpp / x - (xp / x) ** 2 - 0.5 * Jpp / J + 0.5 * (Jp / J) ** 2
    sp = s * lp
    spp = s * (lpp + lp * lp)
    s_x = sp / xp
    s_xx = (spp * xp - sp * xpp) / xp**3
    return s, s_x, s_xx, root, J


def _shape_series(x: float) -> tuple[float, float, float]:
    s = ds = d2s = 0.0
    for i in range(len(_C) - 1, -1, -1):
        s = s * x + _C[i]
    for i in range(len(_C) - 1, 0, -1):
        ds = ds * x + i * _C[i]
    for i in range(len(_C) - 1, 1, -1):
        d2s = d2s * x + i * (i - 1) * _C[i]
    return s * _INV_SQRT3, ds * _INV_SQRT3, d2s * _INV_SQRT3


def shape(x: float) -> tuple[float, float, float]:
    """``Sigma_LN / sigma`` and its first two derivatives in log-moneyness x."""
    if abs(x) < SERIES_CUTOFF:
        return _shape_series(x)
    return _shape_closed(x)[:3]


def atm_series(x: float, order: int = 3) -> float:
    """Truncated ATM expansion of ``Sigma_LN / sigma`` through x**order."""
    return sum(_C[i] * x**i for i in range(order + 1)) * _INV_SQRT3


# ---------------------------------------------------------------------------
# public operations on moneyness k = K/S0


def j_bs(k: float) -> float:
    """Large-deviations rate function J_BS(K/S0) >= 0, zero only at k = 1."""
    k = _check_moneyness(k)
    x = math.log(k)
    if abs(x) < SERIES_CUTOFF:
        s = _shape_series(x)[0]
        return 0.5 * x * x / (s * s)
    return _shape_closed(x)[4]


def _check_vol(vol: float) -> float:
    vol = float(vol)
    if not (vol >= 0.0 and math.isfinite(vol)):
        raise DomainError("vol", f"must be non-negative and finite, got {vol}")
    return vol


def sigma_ln(k: float, vol: float) -> float:
    """Equivalent log-normal volatility Sigma_LN(k) for Black-Scholes vol ``vol``."""
    k, vol = _check_moneyness(k), _check_vol(vol)
    return vol * shape(math.log(k))[0]


def sigma_ln_derivs(k: float, vol: float) -> tuple[float, float]:
    """First and second derivatives of Sigma_LN with respect to log(k)."""
    k, vol = _check_moneyness(k), _check_vol(vol)
    _, d1, d2 = shape(math.log(k))
    return vol * d1, vol * d2


def eqvol_point(k: float, vol: float) -> EqVolPoint:
    k, vol = _check_moneyness(k), _check_vol(vol)
    x = math.log(k)
    if abs(x) < SERIES_CUTOFF:
        s, s1, s2 = _shape_series(x)
        if x >= 0.0:
            name, root = "beta", _beta_from_x(x)
        else:
            name, root = "xi", _xi_from_x(x)[0]
        J = 0.5 * x * x / (s * s)
    else:
        s, s1, s2, root, J = _shape_closed(x)
        name = "beta" if x > 0.0 else "xi"
    return EqVolPoint(k, x, vol * s, vol * s1, vol * s2, name, root, J)
