"""Command-line entry point: ``qrprep run`` and ``qrprep list``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .experiments.catalog import CATALOG, DEFAULT_GRID, ExperimentSpec
from .experiments.records import NONCONVERGED, write_records
from .experiments.runners import run_experiment
from .trainer import TrainerConfig

EXIT_OK = 0
EXIT_NONCONVERGED = 2
EXIT_IO = 3

log = logging.getLogger("qrprep")


def parse_grid(text: str) -> tuple[float, ...]:
    """``'grid'`` (default log grid), ``'grid:lo:hi:n'`` (log spaced) or a comma list."""
    text = text.strip()
    if text == "grid":
        return DEFAULT_GRID
    if text.startswith("grid:"):
        try:
            lo, hi, n = text[5:].split(":")
            return tuple(float(x) for x in np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(n)))
        except ValueError as err:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}: {err}") from None
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad Gamma/P list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty Gamma/P list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qrprep", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="print experiment ids and their figure mapping")
    r = sub.add_parser("run", help="run one experiment and write a CSV of records")
    r.add_argument("--experiment", required=True, choices=sorted(CATALOG))
    r.add_argument("--gamma-over-p", type=parse_grid, default=DEFAULT_GRID,
                   help="comma list, 'grid', or 'grid:lo:hi:n'")
    r.add_argument("--noise", choices=("decay", "all"), default="decay")
    r.add_argument("--realizations", type=int, default=None)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trainer-steps", type=int, default=500,
                   help="random-search steps and maximum genetic steps")
    r.add_argument("--population", type=int, default=10)
    r.add_argument("--mutation", type=float, default=0.01)
    r.add_argument("--distribution", choices=("uniform", "halfnormal"), default="uniform")
    r.add_argument("--constrained", action="store_true",
                   help="discord_hist only: forbid entanglement in the output")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--out", required=True)
    r.add_argument("--no-manifest", action="store_true", help="skip the JSON sidecar")
    r.add_argument("-v", "--verbose", action="store_true")
    return p


def _list() -> int:
    for name, pipe in CATALOG.items():
        print(f"{name:<18} {pipe.figure:<22} {pipe.family}")
    return EXIT_OK


def _run(args) -> int:
    try:
        trainer = TrainerConfig(random_steps=args.trainer_steps, genetic_steps=args.trainer_steps,
                                population=args.population, mutation=args.mutation)
        spec = ExperimentSpec(args.experiment, args.gamma_over_p, args.noise, args.realizations,
                              args.seed, trainer, args.distribution, args.constrained)
    except ValueError as err:
        print(f"qrprep: error: {err}", file=sys.stderr)
        return 1
    records = run_experiment(spec, jobs=args.jobs)
    try:
        write_records(records, args.out, manifest=None if args.no_manifest else spec.to_dict())
    except OSError as err:
        print(f"qrprep: cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_IO
    bad = sum(r.status == NONCONVERGED for r in records)
    log.info("%d records written to %s", len(records), args.out)
    if bad:
        print(f"qrprep: {bad} realization(s) did not reach a steady state", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.command == "list":
        return _list()
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
