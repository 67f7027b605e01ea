"""Command line entry points: timeseries and snapshot renderers."""

from __future__ import annotations

import argparse
import sys

from .plots import plot_snapshot, plot_timeseries
from .snapshots import load_snapshot
from .tables import load_run_table


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="render flow-run CSV tables and CHFSNAP1 snapshots to PNG")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_ts = sub.add_parser("timeseries", help="plot CSV columns against t")
    p_ts.add_argument("--csv", required=True, help="run.csv or compare.csv")
    p_ts.add_argument("--cols", required=True,
                      help="comma-separated column names")
    p_ts.add_argument("--out", required=True, help="output PNG path")
    p_ts.add_argument("--logy", action="store_true", help="log y axis")
    p_ts.add_argument("--title", default=None)

    p_sn = sub.add_parser("snapshot",
                          help="heat maps of |df|^2 and u from a snapshot")
    p_sn.add_argument("--file", required=True, help="CHFSNAP1 snapshot file")
    p_sn.add_argument("--out", required=True, help="output PNG path")

    args = parser.parse_args(argv)
    try:
        if args.cmd == "timeseries":
            table = load_run_table(args.csv)
            cols = [c for c in args.cols.split(",") if c]
            plot_timeseries(table, cols, args.out, logy=args.logy,
                            title=args.title)
        else:
            plot_snapshot(load_snapshot(args.file), args.out)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
