"""Command-line front end: `hankel-lab <suite> [options]`."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .report import SUITES, ConfigError, RunConfig, config_from_mapping, emit_plot_data, read_config_file

log = logging.getLogger("hankel_lab")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hankel-lab", description="Run the numerical verification suites.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", nargs="?", choices=SUITES + ("all",),
                   help="suite to run (or use --suite)")
    p.add_argument("--suite", help="comma-separated suites, or 'all'")
    p.add_argument("--case", help="rank-one case label for scattering/transfer (e.g. A1, D2, F4)")
    p.add_argument("--n", type=int, help="rank for the hankel suite (1, 2; 3 needs --slow)")
    p.add_argument("--seed", type=int, help="seed for sampled spectral points (default 0)")
    p.add_argument("--slow", action="store_true", default=None, help="enable GL_3 checks")
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--out", help="directory for report.json, summary.txt and plot data")
    p.add_argument("--emit-plots", action="store_true", default=None,
                   help="write one CSV per gridded check into the output directory")
    p.add_argument("--quiet", action="store_true", help="only print the summary line")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file first, then command-line flags on top."""
    settings = {}
    if args.config:
        settings.update(read_config_file(args.config))
    if args.command and args.suite:
        raise ConfigError("give the suite either as a command or with --suite, not both")
    if args.command:
        settings["suite"] = args.command
    if args.suite:
        settings["suite"] = args.suite
    for key in ("case", "n", "seed", "out"):
        v = getattr(args, key)
        if v is not None:
            settings[key] = str(v)
    if args.slow is not None:
        settings["slow"] = "true"
    if args.emit_plots is not None:
        settings["emit_plots"] = "true"
    if "suite" not in settings:
        raise ConfigError("no suite selected")
    return config_from_mapping(settings)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        from .suites import run_suite

        report = run_suite(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(report.text_summary())
    else:
        s = report.summary
        print(f"{s['total']} checks: {s['pass']} pass, {s['fail']} fail, {s['inconclusive']} inconclusive")
    if cfg.out:
        path = report.write(cfg.out)
        log.info("wrote %s", path)
        if cfg.emit_plots:
            for check_id in sorted(report.grids):
                emit_plot_data(report, check_id, Path(cfg.out) / f"{check_id}.csv")
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())
