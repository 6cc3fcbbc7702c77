"""Zero set of the fixed-strike call Rho in the (K/S0, (r-q)T) plane.

For each w = sigma sqrt(T)/sqrt(3) the curve is traced in both locus modes
(equivalent vol evaluated at the strike, or flat at sigma/sqrt(3)), and the
sign flip of Rho across every point is checked.
"""

import argparse
import math

from asian_greeks import MarketParams, OptionSpec, rho_fixed
from asian_greeks.rho_analysis import locus_residual, rho_zero_locus


def flips(k: float, w: float, y: float) -> bool:
    vol = math.sqrt(3.0) * w if w > 0 else 1e-4
    m = MarketParams(100.0, y, 0.0, vol)
    lo = rho_fixed(m, OptionSpec.fixed("call", 100.0 * k * (1 - 1e-3), 1.0))
    hi = rho_fixed(m, OptionSpec.fixed("call", 100.0 * k * (1 + 1e-3), 1.0))
    return lo * hi < 0


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--w", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    parser.add_argument("--n", type=int, default=21)
    args = parser.parse_args()
    for w in args.w:
        full = rho_zero_locus(w, n_points=args.n, mode="full")
        flat = rho_zero_locus(w, n_points=args.n, mode="flat")
        print(f"\nw = {w}")
        print(f"  {'y':>7} {'k (full)':>10} {'k (flat)':>10} {'residual':>10} flip")
        for (k, y), (kf, _) in zip(full.points, flat.points):
            res = locus_residual(k, w, y)
            print(f"  {y:7.3f} {k:10.6f} {kf:10.6f} {res:10.1e} {'yes' if flips(k, w, y) else 'NO'}")


if __name__ == "__main__":
    main()
