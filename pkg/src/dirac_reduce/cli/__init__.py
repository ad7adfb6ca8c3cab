"""Command-line entry point ``dirac-reduce``.

Exit codes: 0 every check passed, 1 a verification check failed,
2 inadmissible parameters, 3 I/O or parse error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .. import __version__
from ..errors import ConfigError, DetectionError, NumericError, ParameterError
from .commands import COMMANDS, TOL_TARGET
from .config import load_config
from .report import EXIT_IO, EXIT_PARAMS, EXIT_VERIFY, Report


class _Parser(argparse.ArgumentParser):
    """Usage errors are parse errors: exit 3, not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="dirac-reduce",
                 description="Reducible 4x4 Dirac systems: construction and verification.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="YAML run configuration")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    ap.add_argument("--tol", type=float, help="override the command's primary tolerance")
    ap.add_argument("--input", help="potential file for detect (overrides detect.input)")
    flags = ap.add_mutually_exclusive_group()
    flags.add_argument("--spin-orbit", action="store_true", help="perturb at tau=pi/4, phi=pi/2, eps=1")
    flags.add_argument("--bilayer", action="store_true", help="perturb at tau=pi/4, phi=0, eps=1")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def _inputs(args, cfg):
    echo = {"command": args.command, "config": str(args.config), "tol": args.tol,
            "spin_orbit": args.spin_orbit, "bilayer": args.bilayer, "input": args.input}
    if cfg is not None:
        echo["config_document"] = cfg.raw
    return echo


def run(argv=None, stdout=None, stderr=None):
    """Run one command; returns the exit code (no ``sys.exit``)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    cfg = None
    report = Report(args.command, _inputs(args, None), __version__)
    out = Path(args.out) if args.out else None
    try:
        cfg = load_config(args.config)
        report.inputs = _inputs(args, cfg)
        out = out or cfg.output_dir
        if args.tol is not None:
            if not args.tol > 0.0:
                raise ParameterError(f"--tol must be positive, got {args.tol}")
            for key in TOL_TARGET[args.command]:
                cfg.tolerances[key] = args.tol
        if (args.spin_orbit or args.bilayer) and args.command != "perturb":
            raise ParameterError("--spin-orbit/--bilayer apply to the perturb command only")
        out.mkdir(parents=True, exist_ok=True)
        fn = COMMANDS[args.command]
        if args.command == "detect":
            fn(cfg, report, out, args.input)
        elif args.command == "perturb":
            mode = "spin_orbit" if args.spin_orbit else "bilayer" if args.bilayer else None
            fn(cfg, report, out, mode)
        else:
            fn(cfg, report, out)
    except (ConfigError, OSError) as exc:
        report.exit_code, report.error = EXIT_IO, f"{type(exc).__name__}: {exc}"
    except ParameterError as exc:
        report.exit_code, report.error = EXIT_PARAMS, f"{type(exc).__name__}: {exc}"
    except (DetectionError, NumericError) as exc:
        report.exit_code, report.error = EXIT_VERIFY, f"{type(exc).__name__}: {exc}"
    report.finalize()
    report.timing = time.perf_counter() - t0
    if out is not None:
        try:
            report.write(out)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=stderr)
            report.exit_code = EXIT_IO
    for line in report.summary_lines():
        print(line, file=stderr if report.error else stdout)
    return report.exit_code


def main(argv=None):
    sys.exit(run(argv))
