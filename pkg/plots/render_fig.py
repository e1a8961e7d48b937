#!/usr/bin/env python3
"""Render a simulator CSV table to an SVG or PNG figure.

Usage: render_fig.py --which 3 --in fig3.csv --out fig3.svg

The figure number fixes the expected CSV schema; a mismatched header
aborts with a column diff and exit code 2. Axes are linear by default;
``--scale db`` switches figures 3 and 4 to decibels. Figure 4 draws the
horizontal separability bound unless ``--no-separability-line`` is
given.
"""

import argparse
import sys

from cpt_plots.figures import SchemaError, render_figure


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="render_fig.py",
        description="Render a simulator CSV table to an SVG or PNG figure.",
    )
    parser.add_argument("--which", type=int, choices=(1, 3, 4, 5),
                        required=True, help="figure preset number")
    parser.add_argument("--in", dest="csv_path", required=True,
                        metavar="CSV", help="input table")
    parser.add_argument("--out", dest="out_path", required=True,
                        metavar="IMAGE", help="output image (.svg or .png)")
    parser.add_argument("--scale", choices=("linear", "db"), default="linear",
                        help="axis scaling (db for figures 3 and 4 only)")
    parser.add_argument("--no-separability-line", action="store_true",
                        help="omit the horizontal bound in figure 4")
    args = parser.parse_args(argv)
    try:
        render_figure(args.which, args.csv_path, args.out_path,
                      scale=args.scale,
                      separability_line=not args.no_separability_line)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
