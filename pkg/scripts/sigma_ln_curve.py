"""Equivalent log-normal vol over log-moneyness, with the cubic ATM series
and the large-strike wing form for comparison. Writes CSV to stdout."""

import argparse
import csv
import math
import sys

import numpy as np

from asian_greeks.eqvol import atm_series, shape


def wing(x: float) -> float:
    return 1.0 - (math.log(2.0 * x) - 1.0) / x if x > 1.0 else math.nan


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--x-min", type=float, default=-6.0)
    parser.add_argument("--x-max", type=float, default=12.0)
    parser.add_argument("--n", type=int, default=181)
    args = parser.parse_args()
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["x", "s", "s_prime", "s_second", "atm_cubic", "large_strike_wing"])
    for x in np.linspace(args.x_min, args.x_max, args.n):
        s, s1, s2 = shape(float(x))
        out.writerow([f"{x:.6g}", f"{s:.12g}", f"{s1:.12g}", f"{s2:.12g}", f"{atm_series(float(x)):.12g}", f"{wing(x):.12g}"])


if __name__ == "__main__":
    main()
