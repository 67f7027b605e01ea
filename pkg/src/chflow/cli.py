"""Command line entry points: run, compare, check."""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, parse_config
from .runner import compare_configs, run_check, run_config


def _load(path: str):
    with open(path) as fh:
        text = fh.read()
    return parse_config(text), text


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chflow",
        description="conformal heat flow simulator for sphere-valued maps "
                    "on a periodic 2-torus")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_run = sub.add_parser("run", help="execute one configured run")
    p_run.add_argument("--config", required=True, help="key=value config file")
    p_run.add_argument("--out", help="output directory (default: output.dir)")

    p_cmp = sub.add_parser("compare",
                           help="run two configs on shared initial data and "
                                "write aligned time series")
    p_cmp.add_argument("--config-a", required=True)
    p_cmp.add_argument("--config-b", required=True)
    p_cmp.add_argument("--out", required=True)

    sub.add_parser("check", help="run the built-in invariant suite on "
                                 "canned scenarios")

    args = parser.parse_args(argv)
    try:
        if args.cmd == "run":
            cfg, text = _load(args.config)
            out_dir = args.out if args.out else cfg["output.dir"]
            return run_config(cfg, out_dir, text)
        if args.cmd == "compare":
            cfg_a, text_a = _load(args.config_a)
            cfg_b, text_b = _load(args.config_b)
            return compare_configs(cfg_a, cfg_b, args.out, text_a, text_b)
        return run_check()
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
