"""Command-line entry point: ``weylscatter {sweep,verify,eigen,presets}``."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import Abort, ConfigError, ParseError
from .harness.config import SweepConfig, load_config
from .harness.emit import emit, fmt_float
from .harness.presets import DESCRIPTIONS, PRESETS, preset_text
from .harness.sweep import run_sweep
from .harness.verify import SUITES, verify_suite
from .sturm import dirichlet_eigenvalues

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3


def read_config(source: str) -> SweepConfig:
    """Load a config file, or a built-in one given as ``preset:NAME``."""
    if source.startswith("preset:"):
        name = source.split(":", 1)[1]
        return load_config(preset_text(name), name)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {source}: {exc.strerror}") from exc
    return load_config(text, source)


def _cmd_sweep(args) -> int:
    cfg = read_config(args.config)
    rows = run_sweep(cfg, workers=args.workers)
    emit(rows, args.format or cfg.output.format, args.output or cfg.output.path)
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = read_config(args.config)
    report = verify_suite(cfg, tuple(args.suite))
    if args.json:
        print(json.dumps(report, indent=2, default=str))
    else:
        for name, res in report["suites"].items():
            print(f"{name:14s} {res['status'].upper():7s} {res['runtime']:.2f}s")
            for cname, c in res["checks"].items():
                mark = "ok " if c["passed"] else "BAD"
                print(f"  {mark} {cname:32s} max={c['max']:.3e} thr={c['threshold']:.0e} "
                      f"n={c['points']} skipped={c['skipped']}")
        if report["flagged_points"]:
            print("flagged grid points:", ", ".join(fmt_float(x) for x in report["flagged_points"]))
        print(f"overall {'PASS' if report['passed'] else 'FAIL'} in {report['runtime']:.2f}s")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _cmd_eigen(args) -> int:
    cfg = read_config(args.config)
    problem = cfg.problem.sl_problem()
    if problem is None:
        raise ConfigError("eigen needs an interval problem (sl or const_interval)")
    for e in dirichlet_eigenvalues(problem, args.lambda_max):
        print(fmt_float(e))
    return EXIT_OK


def _cmd_presets(args) -> int:
    if args.show:
        sys.stdout.write(preset_text(args.show).lstrip())
        return EXIT_OK
    for name in PRESETS:
        print(f"{name:22s} {DESCRIPTIONS[name]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weylscatter", description="Weyl-function scattering sweeps and checks.")
    sub = p.add_subparsers(dest="command", required=True)
    cfg_help = "TOML config file, or preset:NAME"

    s = sub.add_parser("sweep", help="evaluate requested outputs over the energy grid")
    s.add_argument("config", help=cfg_help)
    s.add_argument("-o", "--output", help="output path (overrides [output].path; default stdout)")
    s.add_argument("--format", choices=("csv", "jsonl"), help="overrides [output].format")
    s.add_argument("-j", "--workers", type=int, default=1, help="worker processes (default 1)")
    s.set_defaults(func=_cmd_sweep)

    v = sub.add_parser("verify", help="run identity and oracle suites")
    v.add_argument("config", help=cfg_help)
    v.add_argument("--suite", action="append", choices=("all",) + SUITES,
                   help="suite to run (repeatable, default all)")
    v.add_argument("--json", action="store_true", help="print the full report as JSON")
    v.set_defaults(func=_cmd_verify)

    e = sub.add_parser("eigen", help="list Dirichlet eigenvalues up to --lambda-max")
    e.add_argument("config", help=cfg_help)
    e.add_argument("--lambda-max", type=float, required=True)
    e.set_defaults(func=_cmd_eigen)

    r = sub.add_parser("presets", help="list built-in configurations")
    r.add_argument("--show", metavar="NAME", help="print the TOML of one preset")
    r.set_defaults(func=_cmd_presets)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "suite", None) is None and args.command == "verify":
        args.suite = ["all"]
    try:
        return args.func(args)
    except ParseError as exc:
        where = f" (line {exc.line}, column {exc.column})" if exc.line else ""
        print(f"config error{where}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        if isinstance(exc, BrokenPipeError):
            sys.stderr.close()
            return EXIT_OK
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Abort as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
