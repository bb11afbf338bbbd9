#!/usr/bin/env python3
"""Contrast four-point delta growth: flat amalgams versus the grid.

Grids get thicker with radius; tree amalgamations of finite factors with
singleton adhesion sets stay within a fixed band no matter how deep the
tree grows. Run with no arguments for the default corpus.
"""

import argparse

from treeamalg.hyperbolic import delta_growth, half_str


def series(generator, radii):
    rows = []
    for report in delta_growth(generator, radii):
        p = report.params
        rows.append((f"{generator} r={p['radius']}", p["n"],
                     half_str(report.delta4_x2)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid-radii", default="2,4,6")
    parser.add_argument("--amalgam", default="amalgam:k3-singletons")
    parser.add_argument("--depths", default="1,2,3,4")
    args = parser.parse_args()

    grid = series("grid", [int(x) for x in args.grid_radii.split(",")])
    flat = series(args.amalgam, [int(x) for x in args.depths.split(",")])
    width = max(len(label) for label, _, _ in grid + flat)
    print(f"{'graph':{width}}  {'n':>5}  delta4")
    for label, n, d4 in grid + flat:
        print(f"{label:{width}}  {n:>5}  {d4}")

    band = max(r.delta4_x2 for r in
               delta_growth(args.amalgam,
                            [int(x) for x in args.depths.split(",")]))
    print(f"\namalgam stays within delta4 <= {half_str(band)}; "
          "the grid keeps climbing.")


if __name__ == "__main__":
    main()
