"""Command-line interface: ``symdet <subcommand>``.

Exit status 0 on success, 2 on invalid input, 1 on runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .algebra import AlgebraError, AlgebraMatrix, load_algebra
from .estimators import ESTIMATORS, pooled
from .harness import (ConfigError, ExperimentConfig, SweepConfig, format_sweep, read_matrix_csv, run_experiment,
                      run_samples, sweep)
from .multilinear import (RYSER_MAX_N, SizeGuardError, determinant, mixed_discriminant,
                          mixed_discriminant_bruteforce, permanent_ryser)
from .sdet import sdet

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


def _g(x) -> str:
    return format(float(x), ".17g")


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def cmd_exact(args) -> int:
    A = read_matrix_csv(args.matrix)
    print(f"per={_g(permanent_ryser(A))}")
    print(f"det={_g(determinant(A))}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    A = read_matrix_csv(args.matrix)
    if np.any(A < 0):
        raise ConfigError("matrix has negative entries")
    if args.samples < 1:
        raise ConfigError("--samples must be >= 1")
    batch = run_samples(args.estimator, A, args.d, args.samples, args.seed, args.workers, args.independent_denominator)
    P = pooled(batch.numerators, batch.denominators)
    print(f"estimate={_g(P.estimate)}")
    print(f"stderr={_g(P.stderr)}")
    if A.shape[0] <= RYSER_MAX_N:
        print(f"per={_g(permanent_ryser(A))}")
    return EXIT_OK


def cmd_sdet(args) -> int:
    doc = _read_json(args.input)
    try:
        spec = load_algebra(doc["algebra"])
        layers = np.asarray(doc["layers"], dtype=np.float64)
    except KeyError as exc:
        raise ConfigError(f"sdet input needs field {exc}") from exc
    if "n" in doc and layers.ndim == 3 and layers.shape[1] != int(doc["n"]):
        raise ConfigError(f"n = {doc['n']} does not match layer size {layers.shape[1]}")
    value = sdet(spec, AlgebraMatrix(layers))
    print(json.dumps([float(v) for v in value]))
    return EXIT_OK


def cmd_mixed_disc(args) -> int:
    doc = _read_json(args.input)
    mats = doc.get("matrices")
    if mats is None:
        raise ConfigError("mixed-disc input needs a 'matrices' field")
    if "composition" in doc:
        value = mixed_discriminant(mats, doc["composition"])
    else:
        value = mixed_discriminant_bruteforce(mats)
    print(f"D={_g(value)}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.output:
        cfg.output = args.output
    if args.workers:
        cfg.workers = args.workers
    rep = run_experiment(cfg)
    print(json.dumps(rep.data, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig.load(args.config)
    if args.output:
        cfg.output = args.output
    print(format_sweep(sweep(cfg)))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(print) else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symdet", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("exact", help="exact permanent and determinant of a CSV matrix")
    s.add_argument("--matrix", required=True)
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("estimate", help="Monte Carlo permanent estimate")
    s.add_argument("--matrix", required=True)
    s.add_argument("--estimator", required=True, choices=ESTIMATORS)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--independent-denominator", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("sdet", help="symmetrized determinant of a matrix over an algebra (JSON)")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_sdet)

    s = sub.add_parser("mixed-disc", help="mixed discriminant (JSON)")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_mixed_disc)

    s = sub.add_parser("experiment", help="run one estimation campaign")
    s.add_argument("--config", required=True)
    s.add_argument("--output")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("sweep", help="concentration sweep over d and n")
    s.add_argument("--config", required=True)
    s.add_argument("--output")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("selftest", help="quick internal consistency checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    logging.getLogger(__name__).info("kernel backend: %s", kernels.BACKEND)
    try:
        return args.func(args)
    except (ConfigError, AlgebraError, SizeGuardError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
