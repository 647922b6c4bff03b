"""Command-line interface.

Subcommands ``sweep``, ``predict``, ``hist`` and ``lambda``. Exit status is 0
on success, 1 on configuration errors and 2 when more work items fail than
the configured ``max_failures`` allows.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import dynamics, harness, theory

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

log = logging.getLogger("entrans")


def _add_common(p):
    p.add_argument("--config", required=True, help="TOML sweep configuration")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--workers", type=int, help="override the worker count")
    p.add_argument("--out", help="override the output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entrans", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a coupling sweep and write CSV/JSON results")
    _add_common(p)
    p = sub.add_parser("predict", help="write prediction curves on the sweep grid")
    _add_common(p)
    p = sub.add_parser("hist", help="run a sweep and write histograms only")
    _add_common(p)

    p = sub.add_parser("lambda", help="print the transition parameter for a coupling")
    p.add_argument("--system", choices=harness.SYSTEMS, required=True)
    p.add_argument("--n", type=int, help="rotor dimension (kicked_rotor)")
    p.add_argument("--n-a", type=int, help="subsystem A dimension (rmt)")
    p.add_argument("--n-b", type=int, help="subsystem B dimension (rmt)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--b", type=float)
    g.add_argument("--sqrt-lambda", type=float)
    return parser


def _load(args) -> harness.SweepConfig:
    cfg = harness.load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.out is not None:
        changes["output"] = args.out
    return replace(cfg, **changes) if changes else cfg


def _cmd_sweep(args, histograms_only=False) -> int:
    cfg = _load(args)
    if histograms_only and not cfg.histograms:
        cfg = replace(cfg, histograms={k: {} for k in harness.DEFAULT_HISTOGRAMS if cfg.n_a == cfg.n_b or k not in ("tw_max", "exp_min")})
    result = harness.run_sweep(cfg)
    out = harness.write_result(result, cfg.output, histograms_only=histograms_only)
    log.info("wrote %s", out)
    for f in result.failures:
        log.warning("point %s realization %s failed: %s", f["point"], f["realization"], f["error"])
    if len(result.failures) > cfg.max_failures:
        print(f"{len(result.failures)} work item(s) failed (budget {cfg.max_failures})", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_predict(args) -> int:
    cfg = _load(args)
    curves = harness.emit_predictions(cfg)
    out = Path(cfg.output)
    path = out / "predictions.csv" if out.suffix != ".csv" else out
    harness.write_predictions(curves, path)
    log.info("wrote %s", path)
    return EXIT_OK


def _cmd_lambda(args) -> int:
    if args.system == "rmt":
        if args.n_a is None or args.n_b is None:
            raise harness.ConfigError("rmt needs --n-a and --n-b")
        if args.b is not None:
            raise harness.ConfigError("rmt coupling is --epsilon or --sqrt-lambda")
        try:
            eps = args.epsilon
            if eps is None:
                eps = theory.epsilon_from_sqrt_lambda(args.sqrt_lambda, args.n_a, args.n_b)
            lam = theory.lambda_rmt(args.n_a, args.n_b, eps)
        except ValueError as exc:
            raise harness.ConfigError(str(exc)) from None
        print(f"epsilon={eps!r}")
        print(f"lambda={lam!r}")
        print(f"sqrt_lambda={math.sqrt(lam)!r}")
        print(f"lambda_small_epsilon={theory.lambda_rmt_small(args.n_a, args.n_b, eps)!r}")
        return EXIT_OK
    if args.n is None:
        raise harness.ConfigError("kicked_rotor needs --n")
    if args.epsilon is not None:
        raise harness.ConfigError("kicked_rotor coupling is --b or --sqrt-lambda")
    try:
        b = args.b if args.b is not None else dynamics.b_from_sqrt_lambda(args.sqrt_lambda, args.n)
        params = dynamics.KickedRotorParams(n=args.n, b=b)
    except ValueError as exc:
        raise harness.ConfigError(str(exc)) from None
    lam = dynamics.lambda_kicked_rotor(params)
    print(f"b={b!r}")
    print(f"lambda={lam.exact!r}")
    print(f"sqrt_lambda={math.sqrt(lam.exact)!r}")
    print(f"lambda_small_b={lam.small_b!r}")
    print(f"small_coupling={lam.small_coupling}")
    print(f"epsilon_equivalent={float(math.sqrt(3 / (8 * math.pi**4)) * args.n * b)!r}")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors are configuration errors, not numerical failures
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "hist":
            return _cmd_sweep(args, histograms_only=True)
        if args.command == "predict":
            return _cmd_predict(args)
        return _cmd_lambda(args)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
