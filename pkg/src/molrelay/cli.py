"""Command-line front end.

Subcommands:

    analytic  --config FILE [--systems ...]        closed-form point values
    simulate  --config FILE [--system S] --trials N [--seed S] [--detector D]
    sweep     --config FILE [--out CSV] [--workers W] [--analytic-only]
    reproduce {fig2a,fig2b,fig2c} [--out CSV] [--trials N] [--seed S] ...

All output is the fixed CSV contract of molrelay.sweep.  Exit codes:
0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager

from .config import ConfigError, LoadedConfig, load_config, preset_config
from .simulator import DETECTORS, SYSTEMS, available_backends
from .sweep import point_rows, run_sweep, write_rows

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _add_common(parser: argparse.ArgumentParser, *, mc: bool) -> None:
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="output CSV path (default: stdout)")
    if mc:
        parser.add_argument("--trials", type=int, default=None,
                            help="Monte Carlo trials per point")
        parser.add_argument("--seed", type=int, default=None, help="base RNG seed")
        parser.add_argument("--detector", choices=DETECTORS, default=None,
                            help="destination rule (default: linear)")
        parser.add_argument("--workers", type=int, default=1,
                            help="worker processes (results are worker-count invariant)")
        parser.add_argument("--backend", choices=available_backends(), default=None,
                            help="simulation kernel (default: compiled when built)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="molrelay",
        description="Analytics and Monte Carlo simulation for diffusive relay nano-networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="closed-form error probabilities at the config's point")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--systems", nargs="+", choices=SYSTEMS, default=None,
                   help="systems to evaluate (default: the sweep's, else cooperative)")
    _add_common(p, mc=False)

    p = sub.add_parser("simulate", help="Monte Carlo estimate at the config's point")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--system", choices=SYSTEMS, default="cooperative")
    _add_common(p, mc=True)

    p = sub.add_parser("sweep", help="run the config's sweep block")
    p.add_argument("--config", required=True, metavar="FILE")
    p.add_argument("--analytic-only", action="store_true",
                   help="skip Monte Carlo; leave the MC columns empty")
    _add_common(p, mc=True)

    p = sub.add_parser("reproduce", help="run a bundled experiment preset")
    p.add_argument("preset", choices=("fig2a", "fig2b", "fig2c"))
    p.add_argument("--analytic-only", action="store_true",
                   help="skip Monte Carlo; leave the MC columns empty")
    _add_common(p, mc=True)

    return parser


@contextmanager
def _open_out(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _cmd_analytic(args) -> int:
    loaded = load_config(args.config)
    rows = point_rows(loaded, systems=args.systems)
    with _open_out(args.out) as out:
        write_rows(rows, out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    loaded = load_config(args.config)
    trials = args.trials if args.trials is not None else 100_000
    rows = point_rows(
        loaded,
        systems=[args.system],
        trials=trials,
        seed=args.seed,
        detector=args.detector,
        workers=args.workers,
        backend=args.backend,
    )
    with _open_out(args.out) as out:
        write_rows(rows, out)
    return EXIT_OK


def _run_sweep(loaded: LoadedConfig, args) -> int:
    with _open_out(args.out) as out:
        run_sweep(
            loaded,
            out,
            workers=args.workers,
            trials=args.trials,
            seed=args.seed,
            detector=args.detector,
            analytic_only=args.analytic_only,
            backend=args.backend,
        )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    return _run_sweep(load_config(args.config), args)


def _cmd_reproduce(args) -> int:
    return _run_sweep(preset_config(args.preset), args)


_COMMANDS = {
    "analytic": _cmd_analytic,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "reproduce": _cmd_reproduce,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
