"""Monte Carlo reference for continuously averaged Asian options.

Paths use exact lognormal stepping on a uniform grid and trapezoid averages.
Work is split into fixed blocks of paths; block ``b`` draws its normals from
a Philox stream keyed by the seed with counter offset ``b << 128``, so a block
is addressable on its own and the output does not depend on how many threads
run the blocks. Per-block moments are merged in block order.

With antithetic sampling, each pair (Z, -Z) is averaged into one sample
before moments are taken, so ``stderr`` is the i.i.d. standard error of the
pair means.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Mapping

import numpy as np

from .core import (
    GREEK_FIELDS,
    DomainError,
    GreeksReport,
    MarketParams,
    Method,
    OptionSpec,
    ResourceError,
)

MAX_PATHS = 10**10
_MAX_BLOCK_CELLS = 1 << 22  # paths x steps held in memory per block
THREADS_ENV = "ASIAN_GREEKS_THREADS"


class Scheme(str, Enum):
    EXACT_GBM = "exact_gbm"


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 1_000_000
    n_steps: int = 500
    seed: int = 2024
    antithetic: bool = True
    block_size: int = 4096
    n_threads: int | None = None
    scheme: Scheme = Scheme.EXACT_GBM

    def __post_init__(self) -> None:
        for name in ("n_paths", "n_steps", "seed", "block_size"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(name, f"must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n_paths < 1:
            raise DomainError("n_paths", f"must be >= 1, got {self.n_paths}")
        if self.n_steps < 2:
            raise DomainError("n_steps", f"must be >= 2, got {self.n_steps}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed", "must fit in an unsigned 64-bit integer")
        if self.block_size < 2:
            raise DomainError("block_size", "must be >= 2")
        if self.antithetic and self.n_paths % 2:
            raise DomainError("n_paths", "must be even with antithetic sampling")
        if self.n_threads is not None and self.n_threads < 1:
            raise DomainError("n_threads", "must be >= 1")
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    def replace(self, **changes) -> "SimConfig":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return SimConfig(**values)

    @property
    def rows_per_block(self) -> int:
        rows = min(self.block_size, max(2, _MAX_BLOCK_CELLS // self.n_steps))
        return rows - rows % 2

    @property
    def n_blocks(self) -> int:
        return -(-self.n_paths // self.rows_per_block)


@dataclass(frozen=True)
class PathEstimate:
    mean: float
    stderr: float
    n_effective: int

    def within(self, target: float, n_sigma: float = 3.0) -> bool:
        return abs(self.mean - target) <= n_sigma * self.stderr


@dataclass(frozen=True)
class PathStats:
    """Per-path functionals for one block of paths (arrays of equal length).

    ``a_vega`` and ``s_vega`` are the pathwise sigma-derivatives of
    ``a_T`` and ``s_T``. With antithetic sampling the second half of each
    array mirrors the first.
    """

    a_T: np.ndarray
    b_T: np.ndarray
    g_T: np.ndarray
    s_T: np.ndarray
    w_T: np.ndarray
    a_vega: np.ndarray = field(repr=False)
    s_vega: np.ndarray = field(repr=False)


def _thread_count(config: SimConfig) -> int:
    if config.n_threads is not None:
        return config.n_threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError(THREADS_ENV, f"must be an integer, got {env!r}") from None
    return min(4, os.cpu_count() or 1)


def _check_resources(config: SimConfig) -> None:
    if config.n_paths > MAX_PATHS:
        raise ResourceError(f"n_paths={config.n_paths} exceeds the limit {MAX_PATHS}")


def _block_normals(config: SimConfig, block: int) -> np.ndarray:
    rows = config.rows_per_block
    start = block * rows
    count = min(rows, config.n_paths - start)
    bitgen = np.random.Philox(key=config.seed, counter=block << 128)
    gen = np.random.Generator(bitgen)
    if config.antithetic:
        half = gen.standard_normal((count // 2, config.n_steps))
        return np.concatenate([half, -half])
    return gen.standard_normal((count, config.n_steps))


def _paths(market: MarketParams, T: float, z: np.ndarray) -> PathStats:
    n = z.shape[1]
    dt = T / n
    sigma = market.vol
    times = dt * np.arange(1, n + 1)
    w = np.cumsum(z, axis=1)
    w *= math.sqrt(dt)
    log_s = sigma * w
    log_s += (market.carry - 0.5 * sigma * sigma) * times
    s = np.exp(log_s)
    s *= market.spot
    # trapezoid weights on nodes 1..n divided by T; node 0 contributes S0 / (2n)
    weights = np.full(n, 1.0 / n)
    weights[-1] = 0.5 / n
    s0_term = 0.5 * market.spot / n
    a = s @ weights + s0_term
    b = s @ (weights * times)
    g = np.exp(log_s @ weights + math.log(market.spot))
    w_T = w[:, -1]
    s_T = s[:, -1]
    dsig = s * (w - sigma * times)
    return PathStats(a, b, g, s_T, w_T, dsig @ weights, dsig[:, -1])


def simulate(market: MarketParams, T: float, config: SimConfig) -> Iterator[PathStats]:
    """Yield :class:`PathStats` block by block, in block order."""
    if not T > 0.0:
        raise DomainError("maturity", f"must be positive, got {T}")
    _check_resources(config)
    for block in range(config.n_blocks):
        yield _paths(market, T, _block_normals(config, block))


# ---------------------------------------------------------------------------
# reduction


@dataclass
class _Moments:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        mean = float(x.mean())
        return cls(x.size, mean, float(((x - mean) ** 2).sum()))

    def merge(self, other: "_Moments") -> None:
        if other.n == 0:
            return
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean += delta * other.n / n
        self.m2 += other.m2 + delta * delta * self.n * other.n / n
        self.n = n

    def estimate(self) -> PathEstimate:
        if self.n < 2:
            return PathEstimate(self.mean, math.inf, self.n)
        var = self.m2 / (self.n - 1)
        return PathEstimate(self.mean, math.sqrt(var / self.n), self.n)


Functional = Callable[[PathStats], np.ndarray]


def _pair_mean(x: np.ndarray, antithetic: bool) -> np.ndarray:
    if not antithetic:
        return x
    half = x.size // 2
    return 0.5 * (x[:half] + x[half:])


def run_estimators(
    market: MarketParams,
    T: float,
    config: SimConfig,
    functionals: Mapping[str, Functional],
    paths: Callable[[MarketParams, float, np.ndarray], Mapping[str, np.ndarray]] | None = None,
) -> dict[str, PathEstimate]:
    """Evaluate several per-path functionals on one common set of paths.

    ``functionals`` map :class:`PathStats` to per-path samples. For bump
    studies ``paths`` may instead map raw normals to a dict of samples
    directly (``functionals`` is then a list of the expected keys).
    """
    if not T > 0.0:
        raise DomainError("maturity", f"must be positive, got {T}")
    _check_resources(config)

    def work(block: int) -> dict[str, _Moments]:
        z = _block_normals(config, block)
        if paths is None:
            stats = _paths(market, T, z)
            samples = {name: fn(stats) for name, fn in functionals.items()}
        else:
            samples = paths(market, T, z)
        return {name: _Moments.of(_pair_mean(samples[name], config.antithetic)) for name in functionals}

    totals = {name: _Moments() for name in functionals}
    threads = _thread_count(config)
    if threads == 1 or config.n_blocks == 1:
        results = map(work, range(config.n_blocks))
        for part in results:
            for name, mom in part.items():
                totals[name].merge(mom)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(work, range(config.n_blocks)):
                for name, mom in part.items():
                    totals[name].merge(mom)
    return {name: mom.estimate() for name, mom in totals.items()}


# ---------------------------------------------------------------------------
# payoffs and pathwise derivatives


def _check_vol(market: MarketParams) -> None:
    if not market.vol > 0.0:
        raise DomainError("vol", "pathwise estimators need vol > 0")


def _underlying(option: OptionSpec, stats: PathStats) -> tuple[np.ndarray, np.ndarray]:
    """Payoff argument X with payoff (X)^+, and its sign relative to a_T."""
    if option.is_fixed:
        x = stats.a_T - option.strike
        return (x, 1.0) if option.is_call else (-x, -1.0)
    x = option.kappa * stats.s_T - stats.a_T
    return (x, -1.0) if option.is_call else (-x, 1.0)


def payoff(option: OptionSpec, stats: PathStats) -> np.ndarray:
    x, _ = _underlying(option, stats)
    return np.maximum(x, 0.0)


def _d_payoff(option: OptionSpec, stats: PathStats, da: np.ndarray, ds: np.ndarray) -> np.ndarray:
    """Pathwise derivative of the payoff given derivatives of a_T and s_T."""
    x, a_sign = _underlying(option, stats)
    d = a_sign * da
    if not option.is_fixed:
        d = d - a_sign * option.kappa * ds
    return np.where(x > 0.0, d, 0.0)


def _functionals(market: MarketParams, option: OptionSpec) -> dict[str, Functional]:
    T = option.maturity
    disc = math.exp(-market.rate * T)
    S0 = market.spot

    def price(st):
        return disc * payoff(option, st)

    def delta(st):
        # prices are homogeneous of degree one in (S0, K) jointly; pathwise the
        # spot derivative of a_T and s_T is a_T/S0 and s_T/S0
        return disc * _d_payoff(option, st, st.a_T / S0, st.s_T / S0)

    def rho(st):
        return disc * (_d_payoff(option, st, st.b_T, T * st.s_T) - T * payoff(option, st))

    def psi(st):
        return disc * _d_payoff(option, st, -st.b_T, -T * st.s_T)

    def vega(st):
        return disc * _d_payoff(option, st, st.a_vega, st.s_vega)

    return {"price": price, "delta": delta, "rho": rho, "psi": psi, "vega": vega}


def mc_price(market: MarketParams, option: OptionSpec, config: SimConfig) -> PathEstimate:
    f = _functionals(market, option)
    return run_estimators(market, option.maturity, config, {"price": f["price"]})["price"]


def _single(name: str, market: MarketParams, option: OptionSpec, config: SimConfig) -> PathEstimate:
    _check_vol(market)
    f = _functionals(market, option)
    return run_estimators(market, option.maturity, config, {name: f[name]})[name]


def mc_delta_pathwise(market: MarketParams, option: OptionSpec, config: SimConfig) -> PathEstimate:
    return _single("delta", market, option, config)


def mc_rho_pathwise(market: MarketParams, option: OptionSpec, config: SimConfig) -> PathEstimate:
    return _single("rho", market, option, config)


def mc_psi_pathwise(market: MarketParams, option: OptionSpec, config: SimConfig) -> PathEstimate:
    return _single("psi", market, option, config)


def mc_vega_pathwise(market: MarketParams, option: OptionSpec, config: SimConfig) -> PathEstimate:
    return _single("vega", market, option, config)


def _positive_stderr(est: Mapping[str, PathEstimate]) -> dict[str, float]:
    # a field with zero sample variance (no path near the kink, say) is
    # reported with one ulp of its mean as stderr, keeping the report valid
    return {name: max(e.stderr, math.ulp(max(abs(e.mean), 1.0))) for name, e in est.items()}


def mc_greeks(market: MarketParams, option: OptionSpec, config: SimConfig) -> GreeksReport:
    """Price and pathwise Greeks on common paths; Gamma is not estimated (NaN)."""
    _check_vol(market)
    est = run_estimators(market, option.maturity, config, _functionals(market, option))
    return GreeksReport(
        price=est["price"].mean,
        delta=est["delta"].mean,
        gamma=math.nan,
        vega=est["vega"].mean,
        rho=est["rho"].mean,
        psi=est["psi"].mean,
        method=Method.MONTE_CARLO,
        stderr=_positive_stderr(est),
    )


@dataclass(frozen=True)
class MalliavinRho:
    j1: PathEstimate
    j2: PathEstimate
    rho: PathEstimate  # per-path J1 - J2
    gap_to_pathwise: PathEstimate  # per-path (J1 - J2) - pathwise Rho


def mc_malliavin_rho(market: MarketParams, option: OptionSpec, config: SimConfig) -> MalliavinRho:
    """Rho as J1 - J2 with J1 = e^{-rT} E[payoff W_T / sigma], J2 = e^{-rT} T E[payoff].

    The pathwise Rho is evaluated on the same paths, and the per-path gap
    between the two estimators gives a correlation-aware comparison.
    """
    _check_vol(market)
    T = option.maturity
    disc = math.exp(-market.rate * T)
    f = _functionals(market, option)

    def j1(st):
        return disc * payoff(option, st) * st.w_T / market.vol

    def j2(st):
        return disc * T * payoff(option, st)

    def gap(st):
        return j1(st) - j2(st) - f["rho"](st)

    est = run_estimators(
        market, T, config, {"j1": j1, "j2": j2, "rho": lambda st: j1(st) - j2(st), "gap": gap}
    )
    return MalliavinRho(est["j1"], est["j2"], est["rho"], est["gap"])


def mc_probability_above(market: MarketParams, T: float, strike: float, config: SimConfig) -> PathEstimate:
    """P(A_T > K) under the pricing measure."""
    return run_estimators(market, T, config, {"p": lambda st: (st.a_T > strike).astype(float)})["p"]


# ---------------------------------------------------------------------------
# finite differences with common random numbers


@dataclass(frozen=True)
class Bumps:
    """Central-difference half-widths; ``spot`` is relative, the rest absolute."""

    spot: float = 0.01
    vol: float = 1e-3
    rate: float = 1e-3
    dividend: float = 1e-3

    def __post_init__(self) -> None:
        for name in ("spot", "vol", "rate", "dividend"):
            if not getattr(self, name) > 0.0:
                raise DomainError(name, "bump sizes must be positive")


def fd_greeks(
    market: MarketParams, option: OptionSpec, config: SimConfig, bumps: Bumps = Bumps()
) -> GreeksReport:
    """Central-difference Greeks on common normals, per-path differenced."""
    if market.vol <= bumps.vol:
        raise DomainError("vol", "vol must exceed the vol bump")
    T = option.maturity
    h_s = bumps.spot * market.spot
    shifted = {
        "up_s": market.replace(spot=market.spot + h_s),
        "dn_s": market.replace(spot=market.spot - h_s),
        "up_v": market.replace(vol=market.vol + bumps.vol),
        "dn_v": market.replace(vol=market.vol - bumps.vol),
        "up_r": market.replace(rate=market.rate + bumps.rate),
        "dn_r": market.replace(rate=market.rate - bumps.rate),
        "up_q": market.replace(dividend=market.dividend + bumps.dividend),
        "dn_q": market.replace(dividend=market.dividend - bumps.dividend),
    }

    def value(m: MarketParams, z: np.ndarray) -> np.ndarray:
        return math.exp(-m.rate * T) * payoff(option, _paths(m, T, z))

    def samples(m0: MarketParams, T_: float, z: np.ndarray) -> dict[str, np.ndarray]:
        v = {name: value(m, z) for name, m in shifted.items()}
        base = value(m0, z)
        return {
            "price": base,
            "delta": (v["up_s"] - v["dn_s"]) / (2 * h_s),
            "gamma": (v["up_s"] - 2 * base + v["dn_s"]) / (h_s * h_s),
            "vega": (v["up_v"] - v["dn_v"]) / (2 * bumps.vol),
            "rho": (v["up_r"] - v["dn_r"]) / (2 * bumps.rate),
            "psi": (v["up_q"] - v["dn_q"]) / (2 * bumps.dividend),
        }

    est = run_estimators(market, T, config, list(GREEK_FIELDS), paths=samples)
    return GreeksReport(
        **{name: est[name].mean for name in GREEK_FIELDS},
        method=Method.MONTE_CARLO,
        stderr=_positive_stderr(est),
    )


# ---------------------------------------------------------------------------
# discretization diagnostics


@dataclass(frozen=True)
class LadderLevel:
    n_steps: int
    price: PathEstimate
    gap_to_finer: PathEstimate | None  # per-path (finer price - this price)


def ladder_prices(
    market: MarketParams, option: OptionSpec, config: SimConfig, levels: int = 3
) -> list[LadderLevel]:
    """Prices from the fine grid and from its 2x, 4x, ... coarsenings.

    Coarse averages reuse the fine paths' nodes, so level-to-level gaps
    isolate the averaging bias and carry their own per-path stderr.
    """
    if config.n_steps % (1 << levels):
        raise DomainError("n_steps", f"must be divisible by {1 << levels} for {levels} levels")
    T = option.maturity
    disc = math.exp(-market.rate * T)
    strides = [1 << j for j in range(levels + 1)]
    keys = [str(config.n_steps // s) for s in strides]

    def samples(m: MarketParams, T_: float, z: np.ndarray) -> dict[str, np.ndarray]:
        n = z.shape[1]
        dt = T / n
        times = dt * np.arange(1, n + 1)
        log_s = m.vol * np.cumsum(z, axis=1) * math.sqrt(dt) + (m.carry - 0.5 * m.vol**2) * times
        s = m.spot * np.exp(log_s)
        out = {}
        for key, stride in zip(keys, strides):
            sub = s[:, stride - 1 :: stride]
            a = (0.5 * m.spot + sub[:, :-1].sum(axis=1) + 0.5 * sub[:, -1]) / sub.shape[1]
            x = a - option.strike if option.is_fixed else option.kappa * sub[:, -1] - a
            if not option.is_call:
                x = -x
            out[key] = disc * np.maximum(x, 0.0)
        for finer, coarser in zip(keys, keys[1:]):
            out["gap" + coarser] = out[finer] - out[coarser]
        return out

    names = keys + ["gap" + k for k in keys[1:]]
    est = run_estimators(market, T, config, names, paths=samples)
    return [LadderLevel(int(k), est[k], est.get("gap" + k)) for k in keys]
