"""Command line entry point: ``eitsim run | fit | validate``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, EitError
from .runner import fit_file, run, write_csv
from .scenario import load_scenario

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _maybe_plot(table, csv_path, enabled):
    if not enabled:
        return
    from .plotting import plot_table

    png = Path(csv_path).with_suffix(".png")
    plot_table(table, png)
    print(f"wrote {png}")


def cmd_run(args):
    scenario = load_scenario(args.config)
    out = Path(args.out) if args.out else scenario.output_path
    if out is None:
        raise ConfigError(f"{args.config}: output: no output path in config and no --out given")
    table = run(scenario, jobs=args.jobs)
    write_csv(table, out)
    print(f"wrote {out} ({len(table.rows)} rows)")
    _maybe_plot(table, out, args.plot)
    return EXIT_OK


def cmd_fit(args):
    table = fit_file(args.spectrum)
    write_csv(table, args.out)
    print(f"wrote {args.out} ({len(table.rows)} rows)")
    _maybe_plot(table, args.out, args.plot)
    return EXIT_OK


def cmd_validate(args):
    scenario = load_scenario(args.config)
    n = sum(max(1, len(c.intensities)) for c in scenario.cases)
    print(f"{args.config}: ok (kind={scenario.kind}, cases={len(scenario.cases)}, points={n})")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="eitsim", description="EIT and slow-light simulator for a Doppler-broadened Lambda system.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario config and write CSV")
    r.add_argument("config")
    r.add_argument("--out", help="override the output path from the config")
    r.add_argument("--plot", action="store_true", help="also write a PNG next to the CSV")
    r.add_argument("--jobs", type=int, default=1, help="worker processes for independent grid points")
    r.set_defaults(func=cmd_run)

    f = sub.add_parser("fit", help="fit a spectrum or width-sweep CSV")
    f.add_argument("spectrum")
    f.add_argument("--out", required=True)
    f.add_argument("--plot", action="store_true")
    f.set_defaults(func=cmd_fit)

    v = sub.add_parser("validate", help="check a scenario config without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
