"""Command-line front end.

Subcommands: ``price``, ``tables``, ``sigma-ln``, ``rho-zero`` and ``mc``.
Numbers are written with 17 significant digits, each alongside a
display-rounded copy. Exit codes: 0 success, 2 invalid input, 3 solver did
not converge, 4 I/O failure.

A flat ``key = value`` config file (``--config``) can supply any flag;
explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from .core import ConvergenceError, DomainError, MarketParams, OptionSpec, ResourceError
from .eqvol import ATM_COEFFS, shape
from .floating import greeks_floating
from .greeks import greeks_fixed
from .tables import build_table, decimals

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4

_MARKET_DEFAULTS = {
    "spot": 100.0,
    "rate": 0.0,
    "div": 0.0,
    "vol": None,
    "maturity": None,
    "strike": None,
    "kappa": None,
    "kind": "call",
    "style": "fixed",
}
_MC_DEFAULTS = {"paths": 1_000_000, "steps": 500, "seed": 2024, "antithetic": True, "estimator": "price"}


def full(x: float) -> str:
    return format(x, ".17g")


def display(x: float, digits: int = 6) -> str:
    if not math.isfinite(x) or x == 0.0:
        return format(x, "g")
    return format(x, f".{digits}g")


# ---------------------------------------------------------------------------
# config handling


def read_config(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError("config", f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    config = read_config(args.config) if getattr(args, "config", None) else {}
    resolved = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in config:
            resolved[key] = config[key]
        else:
            resolved[key] = default
    return resolved


def _as_float(name: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise DomainError(name, f"expected a number, got {value!r}") from None


def _as_bool(name: str, value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise DomainError(name, f"expected a boolean, got {value!r}")


def _market_option(values: dict) -> tuple[MarketParams, OptionSpec]:
    for required in ("vol", "maturity"):
        if values[required] is None:
            raise DomainError(required, "is required")
    market = MarketParams(
        _as_float("spot", values["spot"]),
        _as_float("rate", values["rate"]),
        _as_float("div", values["div"]),
        _as_float("vol", values["vol"]),
    )
    T = _as_float("maturity", values["maturity"])
    style = str(values["style"])
    if style == "floating":
        if values["kappa"] is None:
            raise DomainError("kappa", "is required for floating strikes")
        option = OptionSpec.floating(values["kind"], _as_float("kappa", values["kappa"]), T)
    else:
        if values["strike"] is None:
            raise DomainError("strike", "is required for fixed strikes")
        option = OptionSpec(values["kind"], style, _as_float("strike", values["strike"]), T)
    return market, option


def _inputs(market: MarketParams, option: OptionSpec) -> dict:
    out = {
        "spot": market.spot,
        "rate": market.rate,
        "div": market.dividend,
        "vol": market.vol,
        "maturity": option.maturity,
        "kind": option.kind.value,
        "style": option.style.value,
    }
    out["strike" if option.is_fixed else "kappa"] = option.strike
    return out


def _dump_json(obj, out) -> None:
    json.dump(obj, out, indent=2, allow_nan=False)
    out.write("\n")


def _write_csv(rows: Sequence[Sequence[str]], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerows(rows)


# ---------------------------------------------------------------------------
# subcommands


def cmd_price(args, out) -> int:
    market, option = _market_option(_resolve(args, _MARKET_DEFAULTS))
    if option.is_fixed:
        report = greeks_fixed(market, option, exact_gamma=args.exact_gamma)
    else:
        report = greeks_floating(market, option)
    values = {name: report.as_dict()[name] for name in ("price", "delta", "gamma", "vega", "rho", "psi")}
    if args.format == "csv":
        rows = [("field", "value", "display")]
        rows += [(name, full(v), display(v)) for name, v in values.items()]
        _write_csv(rows, out)
    else:
        _dump_json(
            {
                "inputs": _inputs(market, option),
                "method": report.method.value,
                "values": values,
                "display": {name: display(v) for name, v in values.items()},
            },
            out,
        )
    return EXIT_OK


def _table_rows(number: int) -> tuple[list[str], list[list[str]]]:
    table = build_table(number)
    header: list[str] = []
    for col in table.columns:
        header.append(col)
        if not isinstance(table.rows[0][col], str):
            header.append(col + "_display")
    body = []
    for row in table.rows:
        cells = []
        for col in table.columns:
            value = row[col]
            if isinstance(value, str):
                cells.append(value)
            else:
                printed = row[col + "_printed"]
                cells += [full(value), format(value, f".{decimals(printed)}f")]
        body.append(cells)
    return header, body


def cmd_tables(args, out) -> int:
    header, body = _table_rows(args.which)
    if args.format == "md":
        out.write("| " + " | ".join(header) + " |\n")
        out.write("|" + "---|" * len(header) + "\n")
        for cells in body:
            out.write("| " + " | ".join(cells) + " |\n")
    else:
        _write_csv([header] + body, out)
    return EXIT_OK


def atm_series_value(x: float) -> float:
    """Three-term ATM series of Sigma_LN / sigma (cubic in x)."""
    c = [float(a) for a in ATM_COEFFS[:4]]
    return (c[0] + x * (c[1] + x * (c[2] + x * c[3]))) / math.sqrt(3.0)


def cmd_sigma_ln(args, out) -> int:
    if not args.n >= 2:
        raise DomainError("n", "need at least two points")
    if not args.x_max > args.x_min:
        raise DomainError("x_max", "must exceed x_min")
    xs = np.linspace(args.x_min, args.x_max, args.n)
    if args.x_min < 0.0 < args.x_max and 0.0 not in xs:
        xs = np.sort(np.append(xs, 0.0))
    rows = [("x", "k", "sigma_ln_over_sigma", "atm_series", "display")]
    for x in xs:
        s = shape(float(x))[0]
        rows.append((full(x), full(math.exp(x)), full(s), full(atm_series_value(float(x))), display(s)))
    _write_csv(rows, out)
    return EXIT_OK


def cmd_rho_zero(args, out) -> int:
    from .rho_analysis import rho_zero_locus

    rows = [("w", "k", "y", "display_k")]
    for w in args.w:
        curve = rho_zero_locus(w, (args.y_min, args.y_max), args.n, args.mode)
        for k, y in curve.points:
            rows.append((full(w), full(k), full(y), display(k)))
    _write_csv(rows, out)
    return EXIT_OK


def _estimate_json(est) -> dict:
    return {"mean": est.mean, "stderr": est.stderr}


def cmd_mc(args, out) -> int:
    from . import mc

    values = _resolve(args, _MARKET_DEFAULTS)
    market, option = _market_option(values)
    opts = _resolve(args, _MC_DEFAULTS)
    config = mc.SimConfig(
        n_paths=int(_as_float("paths", opts["paths"])),
        n_steps=int(_as_float("steps", opts["steps"])),
        seed=int(_as_float("seed", opts["seed"])),
        antithetic=_as_bool("antithetic", opts["antithetic"]),
    )
    samples = config.n_paths // 2 if config.antithetic else config.n_paths
    if samples < 2:
        raise DomainError("paths", "need at least two independent samples for a standard error")
    name = str(opts["estimator"])
    components = None
    if name == "price":
        est = mc.mc_price(market, option, config)
    elif name in ("delta", "rho", "psi", "vega"):
        est = getattr(mc, f"mc_{name}_pathwise")(market, option, config)
    elif name == "malliavin":
        res = mc.mc_malliavin_rho(market, option, config)
        est = res.rho
        components = {"j1": res.j1, "j2": res.j2, "pathwise_gap": res.gap_to_pathwise}
    elif name in ("greeks", "fd"):
        report = mc.mc_greeks(market, option, config) if name == "greeks" else mc.fd_greeks(market, option, config)
        components = {f: mc.PathEstimate(getattr(report, f), se, 0) for f, se in report.stderr.items()}
        est = components["price"]
    else:
        raise DomainError("estimator", f"unknown estimator {name!r}")
    payload = {
        "estimator": name,
        "mean": est.mean,
        "stderr": est.stderr,
        "display": display(est.mean),
        "n_paths": config.n_paths,
        "n_steps": config.n_steps,
        "seed": config.seed,
        "antithetic": config.antithetic,
        "inputs": _inputs(market, option),
    }
    if components:
        payload["components"] = {k: _estimate_json(v) for k, v in components.items()}
    _dump_json(payload, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_market_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spot", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--div", type=float, help="dividend yield q")
    p.add_argument("--vol", type=float)
    p.add_argument("--maturity", type=float)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--strike", type=float)
    group.add_argument("--kappa", type=float, help="floating-strike multiplier")
    p.add_argument("--kind", choices=("call", "put"))
    p.add_argument("--style", choices=("fixed", "floating"))
    p.add_argument("--config", help="flat key = value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asian-greeks", description=__doc__.splitlines()[0])
    parser.add_argument("--output", "-o", help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="analytic price and Greeks")
    _add_market_flags(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--exact-gamma", action="store_true", help="exact second derivative of the price")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("tables", help="benchmark tables 1-5")
    p.add_argument("which", type=int, choices=range(1, 6))
    p.add_argument("--format", choices=("csv", "md"), default="csv")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("sigma-ln", help="equivalent log-normal vol curve")
    p.add_argument("--x-min", type=float, default=-3.0)
    p.add_argument("--x-max", type=float, default=3.0)
    p.add_argument("--n", type=int, default=121)
    p.set_defaults(func=cmd_sigma_ln)

    p = sub.add_parser("rho-zero", help="zero set of the fixed-strike call Rho")
    p.add_argument("--w", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    p.add_argument("--y-min", type=float, default=-1.0)
    p.add_argument("--y-max", type=float, default=1.0)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--mode", choices=("full", "flat"), default="full")
    p.set_defaults(func=cmd_rho_zero)

    p = sub.add_parser("mc", help="Monte Carlo estimators")
    _add_market_flags(p)
    p.add_argument("--paths", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-antithetic", dest="antithetic", action="store_false", default=None)
    p.add_argument(
        "--estimator", choices=("price", "delta", "vega", "rho", "psi", "greeks", "fd", "malliavin")
    )
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    buffer = io.StringIO()
    try:
        code = args.func(args, buffer)
    except DomainError as exc:
        print(f"error: invalid {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"error: did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(buffer.getvalue())
        else:
            sys.stdout.write(buffer.getvalue())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
