"""Monte Carlo prices at the benchmark scenarios against the approximation
and the published reference column."""

import argparse
import time

from asian_greeks import MarketParams, OptionSpec, price_fixed
from asian_greeks.mc import SimConfig, ladder_prices, mc_price
from asian_greeks.tables import load_fixtures, parse_number


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=200_000)
    parser.add_argument("--steps", type=int, default=500)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--ladder", action="store_true", help="also report time-grid bias levels")
    args = parser.parse_args()
    cfg = SimConfig(n_paths=args.paths, n_steps=args.steps, seed=args.seed)
    fx = load_fixtures()
    for key in ("atm_prices", "otm_prices"):
        scn = fx[key]["scenario"]
        print(f"\n{key}: K = {scn['strike']}, r = {scn['rate']}")
        print(f"  {'vol':>4} {'T':>5} {'approx':>9} {'reference':>9} {'MC':>9} {'stderr':>8} {'secs':>5}")
        for row in fx[key]["rows"]:
            vol, T = parse_number(row["vol"]), parse_number(row["maturity"])
            m = MarketParams(parse_number(scn["spot"]), parse_number(scn["rate"]), parse_number(scn["dividend"]), vol)
            o = OptionSpec.fixed("call", parse_number(scn["strike"]), T)
            t0 = time.perf_counter()
            est = mc_price(m, o, cfg)
            secs = time.perf_counter() - t0
            print(
                f"  {row['vol']:>4} {row['maturity']:>5} {price_fixed(m, o):9.5f} {row['ctmc']:>9}"
                f" {est.mean:9.5f} {est.stderr:8.5f} {secs:5.1f}"
            )
            if args.ladder:
                for lv in ladder_prices(m, o, cfg, levels=2)[1:]:
                    gap = lv.gap_to_finer
                    print(f"        {lv.n_steps:>4} steps: finer - this = {gap.mean:+.2e} +/- {gap.stderr:.1e}")


if __name__ == "__main__":
    main()
