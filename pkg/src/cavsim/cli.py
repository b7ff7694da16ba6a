"""Command-line interface.

    cavsim run CONFIG [--out-dir DIR] [--stride N] [--no-plot] [--allow-unknown]
    cavsim sweep CONFIG --axis NAME --values V1,V2,... [--workers N]
    cavsim presets list
    cavsim presets run NAME|all

Exit codes: 0 success, 2 config error, 3 integration error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import scenario
from .errors import ConfigError, IntegrationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_IO = 4


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${scenario.OUT_DIR_ENV} or ./cavsim_out)")
    p.add_argument("--stride", type=int, default=None, help="override record_stride")
    p.add_argument("--no-plot", action="store_true", help="skip SVG output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavsim", description="OH+ cavity open-system simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario file")
    run.add_argument("config")
    run.add_argument("--allow-unknown", action="store_true", help="warn on unknown keys instead of failing")
    _common(run)

    sweep = sub.add_parser("sweep", help="run a scenario over a list of parameter values")
    sweep.add_argument("config")
    sweep.add_argument("--axis", required=True, choices=scenario.SWEEP_AXES)
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--allow-unknown", action="store_true")
    _common(sweep)

    presets = sub.add_parser("presets", help="built-in figure scenarios")
    psub = presets.add_subparsers(dest="action", required=True)
    psub.add_parser("list")
    prun = psub.add_parser("run")
    prun.add_argument("name", help="preset name or 'all'")
    _common(prun)
    return parser


def _with_stride(cfg: scenario.ScenarioConfig, stride: int | None) -> scenario.ScenarioConfig:
    return cfg if stride is None else cfg.replace(record_stride=stride)


def _report(res: scenario.RunResult) -> None:
    print(f"{res.config.name}: {len(res.trajectory)} records -> {res.csv_path}")
    if res.svg_path:
        print(f"{res.config.name}: plot -> {res.svg_path}")


def _dispatch(args) -> int:
    if args.command == "run":
        cfg = _with_stride(scenario.load_config(args.config, strict=not args.allow_unknown), args.stride)
        _report(scenario.run_scenario(cfg, args.out_dir, plot=not args.no_plot))
    elif args.command == "sweep":
        base = _with_stride(scenario.load_config(args.config, strict=not args.allow_unknown), args.stride)
        values = [v for v in args.values.split(",") if v.strip()]
        path = scenario.run_sweep(base, args.axis, values, args.out_dir,
                                  plot=not args.no_plot, workers=args.workers)
        print(f"sweep summary -> {path}")
    elif args.action == "list":
        for name in scenario.preset_names():
            cfg = scenario.load_preset(name)
            print(f"{name}\t{cfg.model}\tomega_el={cfg.omega_el:g}\tinitial={cfg.resolved_initial_state}")
    else:
        names = scenario.preset_names() if args.name == "all" else [args.name]
        for name in names:
            cfg = _with_stride(scenario.load_preset(name), args.stride)
            _report(scenario.run_scenario(cfg, args.out_dir, plot=not args.no_plot))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
