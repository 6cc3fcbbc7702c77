"""Regenerate the five benchmark tables and report errors in last-digit units."""

import argparse

from asian_greeks.tables import build_table


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("tables", nargs="*", type=int, default=[1, 2, 3, 4, 5])
    args = parser.parse_args()
    worst = []
    for number in args.tables:
        table = build_table(number)
        print(f"\nTable {number}: {table.title}")
        print(f"  {'value':<32} {'printed':>10} {'computed':>14} {'units':>6}")
        for comp in table.comparisons:
            flag = "" if comp.ok else "  <-- off"
            print(f"  {comp.label:<32} {comp.printed:>10} {comp.computed:>14.8f} {comp.error_units:>6.2f}{flag}")
            worst.append((comp.error_units, number, comp.label))
    off = [w for w in worst if w[0] > 1.0 + 1e-9]
    print(f"\n{len(worst) - len(off)}/{len(worst)} values within one unit of the last printed digit")
    for units, number, label in sorted(off, reverse=True):
        print(f"  table {number} {label}: {units:.2f} units")


if __name__ == "__main__":
    main()
