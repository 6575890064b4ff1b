"""Command line front end: one subcommand per figure kind."""

from __future__ import annotations

import argparse
import sys

from .plots import FigureSpec, plot
from .readers import ArtifactError


def make_parser():
    parser = argparse.ArgumentParser(
        prog="nch-figs", description="Render figures from nch-etd run artifacts"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="1D solution profiles from snapshots")
    p.add_argument("snapshots", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--zoom", nargs=2, type=float, metavar=("XMIN", "XMAX"))
    p.add_argument("--label", action="append", default=[])

    p = sub.add_parser("contour-panel", help="2D phase-field panel sheet")
    p.add_argument("snapshots", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--cols", type=int, default=3)
    p.add_argument("--label", action="append", default=[])

    p = sub.add_parser("energy-loglog", help="energy decay with optional fit overlay")
    p.add_argument("runlogs", nargs="+")
    p.add_argument("--fit", help="fit CSV to overlay")
    p.add_argument("--out", required=True)
    p.add_argument("--label", action="append", default=[])

    p = sub.add_parser("rate-plot", help="error vs step size from a rate table")
    p.add_argument("tables", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--label", action="append", default=[])
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "profile":
            spec = FigureSpec(kind="profile", inputs=args.snapshots,
                              output=args.out, labels=args.label,
                              zoom=tuple(args.zoom) if args.zoom else None)
        elif args.command == "contour-panel":
            spec = FigureSpec(kind="contour_panel", inputs=args.snapshots,
                              output=args.out, labels=args.label,
                              columns=args.cols)
        elif args.command == "energy-loglog":
            spec = FigureSpec(kind="energy_loglog", inputs=args.runlogs,
                              output=args.out, labels=args.label,
                              fit_input=args.fit)
        else:
            spec = FigureSpec(kind="rate_table_plot", inputs=args.tables,
                              output=args.out, labels=args.label)
        plot(spec)
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
