"""Validated value types shared across the package.

All types are frozen dataclasses; construction runs validation, so an
instance that exists is always consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping


class DomainError(ValueError):
    """An input lies outside the domain of a formula or type.

    ``field`` names the offending parameter so callers (the CLI in
    particular) can report it.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its budget."""


class ResourceError(RuntimeError):
    """A request would exceed a hard resource limit."""


class OptionKind(str, Enum):
    CALL = "call"
    PUT = "put"


class StrikeStyle(str, Enum):
    FIXED = "fixed"
    FLOATING = "floating"


class Method(str, Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"
    FINITE_DIFFERENCE = "finite_difference"


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(name, f"must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class MarketParams:
    """Black-Scholes world: spot, risk-free rate, dividend yield, volatility.

    Rates are continuously compounded per year and may be negative. ``vol``
    may be zero (deterministic dynamics).
    """

    spot: float
    rate: float = 0.0
    dividend: float = 0.0
    vol: float = 0.0

    def __post_init__(self) -> None:
        spot = _finite("spot", self.spot)
        if spot <= 0.0:
            raise DomainError("spot", f"must be positive, got {spot}")
        vol = _finite("vol", self.vol)
        if vol < 0.0:
            raise DomainError("vol", f"must be non-negative, got {vol}")
        object.__setattr__(self, "spot", spot)
        object.__setattr__(self, "vol", vol)
        object.__setattr__(self, "rate", _finite("rate", self.rate))
        object.__setattr__(self, "dividend", _finite("dividend", self.dividend))

    @property
    def carry(self) -> float:
        """Drift r - q of the underlying."""
        return self.rate - self.dividend

    def replace(self, **changes: float) -> "MarketParams":
        values = {"spot": self.spot, "rate": self.rate, "dividend": self.dividend, "vol": self.vol}
        values.update(changes)
        return MarketParams(**values)

    def swapped(self) -> "MarketParams":
        """Same market with rate and dividend exchanged."""
        return MarketParams(self.spot, self.dividend, self.rate, self.vol)


@dataclass(frozen=True)
class OptionSpec:
    """An Asian option with continuous arithmetic averaging over [0, T].

    Fixed strike pays ``(A_T - K)^+`` / ``(K - A_T)^+``; floating strike pays
    ``(kappa S_T - A_T)^+`` / ``(A_T - kappa S_T)^+``. Use :meth:`fixed` and
    :meth:`floating` rather than filling ``strike`` by hand.
    """

    kind: OptionKind
    style: StrikeStyle
    strike: float
    maturity: float

    def __post_init__(self) -> None:
        try:
            kind = OptionKind(self.kind)
        except ValueError:
            raise DomainError("kind", f"must be 'call' or 'put', got {self.kind!r}") from None
        try:
            style = StrikeStyle(self.style)
        except ValueError:
            raise DomainError("style", f"must be 'fixed' or 'floating', got {self.style!r}") from None
        name = "strike" if style is StrikeStyle.FIXED else "kappa"
        strike = _finite(name, self.strike)
        if strike <= 0.0:
            raise DomainError(name, f"must be positive, got {strike}")
        maturity = _finite("maturity", self.maturity)
        if maturity <= 0.0:
            raise DomainError("maturity", f"must be positive, got {maturity}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "style", style)
        object.__setattr__(self, "strike", strike)
        object.__setattr__(self, "maturity", maturity)

    @classmethod
    def fixed(cls, kind: OptionKind | str, strike: float, maturity: float) -> "OptionSpec":
        return cls(kind, StrikeStyle.FIXED, strike, maturity)

    @classmethod
    def floating(cls, kind: OptionKind | str, kappa: float, maturity: float) -> "OptionSpec":
        return cls(kind, StrikeStyle.FLOATING, kappa, maturity)

    @property
    def is_call(self) -> bool:
        return self.kind is OptionKind.CALL

    @property
    def is_fixed(self) -> bool:
        return self.style is StrikeStyle.FIXED

    @property
    def kappa(self) -> float:
        if self.is_fixed:
            raise AttributeError("fixed-strike option has no kappa")
        return self.strike


GREEK_FIELDS = ("price", "delta", "gamma", "vega", "rho", "psi")


@dataclass(frozen=True)
class GreeksReport:
    """Price and first/second-order sensitivities of one option.

    ``stderr`` maps field names to Monte Carlo standard errors and is
    required (all entries strictly positive) when ``method`` is
    MONTE_CARLO. Fields that a method cannot estimate are NaN.
    """

    price: float
    delta: float
    gamma: float
    vega: float
    rho: float
    psi: float
    method: Method = Method.ANALYTIC
    stderr: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method(self.method))
        stderr = dict(self.stderr)
        unknown = set(stderr) - set(GREEK_FIELDS)
        if unknown:
            raise DomainError("stderr", f"unknown fields {sorted(unknown)}")
        if self.method is Method.MONTE_CARLO:
            for name in GREEK_FIELDS:
                if math.isnan(getattr(self, name)):
                    continue
                err = stderr.get(name)
                if err is None or not err > 0.0:
                    raise DomainError("stderr", f"Monte Carlo field {name!r} needs a positive stderr")
        object.__setattr__(self, "stderr", stderr)

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in GREEK_FIELDS}
        out["method"] = self.method.value
        if self.stderr:
            out["stderr"] = dict(self.stderr)
        return out


def validate(market: MarketParams, option: OptionSpec) -> None:
    """Re-check both invariants; raises :class:`DomainError` on failure.

    Instances built through the constructors are already valid, so this is
    mostly useful for objects mutated through ``object.__setattr__`` or
    duck-typed stand-ins.
    """
    MarketParams(market.spot, market.rate, market.dividend, market.vol)
    OptionSpec(option.kind, option.style, option.strike, option.maturity)
