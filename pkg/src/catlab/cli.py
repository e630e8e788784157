"""``catlab`` command line.

Exit status: 0 on success, 2 for usage or parameter errors, 3 when a
numerical routine fails or a validation check does not pass.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Optional, Sequence, TextIO

from . import analytic as an
from . import io
from .errors import CatlabError, DomainError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

TABLE1_DEGREES = (2, 3, 5, 7, 10, 20, 50, 100, 200)
#: largest growth rate accepted on a figure grid
LAMBDA_MAX = 1e3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # route argparse failures through our exit codes
        raise UsageError(f"{self.prog}: {message}")


class NumericFailure(Exception):
    pass


# -- commands ------------------------------------------------------------------

def cmd_table1(args) -> tuple[dict, list[dict]]:
    for d in args.d:
        if d < 2:
            raise DomainError(f"--d values must be >= 2, got {d}")
    rows = [{"d": d, "lambda_d": lam, "lambda_d_3dp": float(f"{lam:.3f}")}
            for d, lam in an.table1(args.d)]
    return {"d": list(args.d)}, rows


def _require(args, name: str, model: str) -> None:
    if getattr(args, name) is None:
        raise DomainError(f"--{name} is required for model {model}")


def cmd_psi(args) -> tuple[dict, list[dict]]:
    lam, model = args.lam, args.model
    if model == "tree":
        _require(args, "d", model)
        if args.d in (2, 3):
            psi, method = an.psi_tree_closed(args.d, lam), "closed-form"
        else:
            psi, method = an.psi_tree_general(args.d, lam), "fixed-point"
    elif model == "free":
        psi, method = an.psi_free(lam), "fixed-point"
    else:
        _require(args, "p", model)
        fn = an.psi_geometric if model == "geom" else an.psi_binomial
        psi, method = fn(lam, args.p), "closed-form"
    params = {"model": model, "lambda": lam, "d": args.d, "p": args.p}
    return params, [dict(params, psi=psi, method=method)]


def cmd_tau(args) -> tuple[dict, list[dict]]:
    lam, model = args.lam, args.model
    if model == "tree":
        _require(args, "d", model)
        value = an.mean_tau_tree(args.d, lam)
    else:
        value = an.mean_tau_free(lam)
    params = {"model": model, "lambda": lam, "d": args.d}
    return params, [dict(params, mean_time=value.value)]


def _grid(args) -> list[float]:
    if args.lam is not None:
        grid = list(args.lam)
    else:
        if args.points < 1:
            raise DomainError("--points must be >= 1")
        grid = [args.lambda_max * i / args.points for i in range(1, args.points + 1)]
    for lam in grid:
        if not 0.0 < lam <= LAMBDA_MAX:
            raise DomainError(f"grid values must lie in (0, {LAMBDA_MAX:g}], got {lam!r}")
    return grid


def cmd_figure_data(args) -> tuple[dict, list[dict]]:
    grid = _grid(args)
    other = an.psi_geometric if args.figure == 1 else an.psi_binomial
    uniform = {lam: an.psi_free(lam) for lam in grid}
    rows: list[dict[str, Any]] = []
    for p in args.p:
        for lam in grid:
            rows.append({"kind": "psi", "lambda": lam, "p": p,
                         "psi_uniform": uniform[lam], "psi_other": other(lam, p)})
        if args.figure == 2 and p < 1.0 / 3.0:
            cross = an.crossover_lambda(p)
            rows.append({"kind": "crossover", "lambda": cross, "p": p,
                         "psi_uniform": an.psi_free(cross), "psi_other": an.psi_binomial(cross, p)})
    params = {"figure": args.figure, "p": list(args.p), "lambda": grid}
    return params, rows


def _check_figure1(rows: list[dict]) -> None:
    for row in rows:
        if row["psi_uniform"] < row["psi_other"] - 1e-12:
            raise NumericFailure(
                f"uniform catastrophes less severe than geometric at lambda={row['lambda']}, p={row['p']}")


def cmd_simulate(args) -> tuple[dict, Any]:
    from .montecarlo import Model, SimConfig, estimate

    if args.replicates < 1:
        raise DomainError(f"--replicates must be >= 1, got {args.replicates}")
    if args.model == "tree":
        _require(args, "d", args.model)
        model = Model.tree(args.d)
    elif args.model in ("geom", "binom"):
        _require(args, "p", args.model)
        model = Model.geometric(args.p) if args.model == "geom" else Model.binomial(args.p)
    else:
        model = Model.no_dispersion() if args.model == "no-dispersion" else Model.free()
    cfg = SimConfig(model=model, lam=args.lam, seed=args.seed, replicates=args.replicates,
                    horizon=args.horizon, colony_cap=args.cap, individual=args.individual,
                    leap_threshold=args.leap_threshold, threads=args.threads)
    summary = estimate(cfg)
    if args.times_out:
        rows = [{"replicate_time": float(t)} for t in summary.extinction_times]
        io.write(io.to_csv(rows) if rows else "replicate_time\n", args.times_out, sys.stdout)
    params = {"model": args.model, "lambda": args.lam, "d": args.d, "p": args.p, "seed": args.seed,
              "replicates": args.replicates, "horizon": args.horizon, "cap": args.cap,
              "individual": args.individual, "leap_threshold": args.leap_threshold}
    return params, summary.to_dict()


def cmd_validate(args, stdout: TextIO) -> int:
    from .validation import format_report, run_validation

    faults = [args.inject_fault] if args.inject_fault else []
    results = run_validation(args.level, seed=args.seed, faults=faults)
    if args.format == "json":
        rows = [{"check": r.name, "level": r.level, "passed": r.passed,
                 "seconds": round(r.seconds, 3), "detail": r.detail} for r in results]
        text = io.to_json("validate", {"level": args.level, "seed": args.seed}, rows)
    else:
        text = format_report(results)
    io.write(text, args.out, stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


# -- parser --------------------------------------------------------------------

def _output_flags(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="catlab", description="Growth models under uniform catastrophes.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table1", help="critical growth rates of the tree model")
    p.add_argument("--d", type=int, nargs="+", default=list(TABLE1_DEGREES))
    _output_flags(p, "csv")

    p = sub.add_parser("psi", help="extinction probability")
    p.add_argument("--model", choices=("tree", "free", "geom", "binom"), required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=float)
    _output_flags(p, "csv")

    p = sub.add_parser("tau", help="mean extinction time (inf at the critical point)")
    p.add_argument("--model", choices=("tree", "free"), required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--d", type=int)
    _output_flags(p, "csv")

    p = sub.add_parser("figure-data", help="extinction curves, uniform vs geometric (1) or binomial (2)")
    p.add_argument("--figure", type=int, choices=(1, 2), required=True)
    p.add_argument("--p", type=float, nargs="+", required=True)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", help="explicit grid")
    p.add_argument("--lambda-max", type=float, default=20.0)
    p.add_argument("--points", type=int, default=80)
    _output_flags(p, "csv")

    p = sub.add_parser("simulate", help="Monte Carlo estimate of extinction probability and time")
    p.add_argument("--model", choices=("no-dispersion", "tree", "free", "geom", "binom"), required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--horizon", type=float, default=1e3)
    p.add_argument("--cap", type=int, default=100_000)
    p.add_argument("--individual", action="store_true",
                   help="simulate colony growth explicitly instead of drawing survivors from the law")
    p.add_argument("--leap-threshold", type=int, default=1000)
    p.add_argument("--threads", type=int, help="worker threads (default: $CATLAB_THREADS, 0 = all cores)")
    p.add_argument("--times-out", help="write extinction times of extinct replicates as CSV here")
    _output_flags(p, "json")

    p = sub.add_parser("validate", help="run the cross-check suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--inject-fault", help=argparse.SUPPRESS)
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


_COMMANDS = {"table1": cmd_table1, "psi": cmd_psi, "tau": cmd_tau,
             "figure-data": cmd_figure_data, "simulate": cmd_simulate}


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None,
         stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, stream=stderr, format="%(name)s: %(message)s")

    try:
        if args.command == "validate":
            return cmd_validate(args, stdout)
        params, results = _COMMANDS[args.command](args)
        if args.format == "json":
            text = io.to_json(args.command, params, results)
        else:
            text = io.to_csv(results if isinstance(results, list) else [results])
        io.write(text, args.out, stdout)
        if args.command == "figure-data" and args.figure == 1:
            _check_figure1(results)
    except (DomainError, UsageError, ValueError) as exc:
        stderr.write(f"catlab {args.command}: {exc}\n")
        return EXIT_USAGE
    except (CatlabError, ArithmeticError, NumericFailure) as exc:
        stderr.write(f"catlab {args.command}: numeric failure: {exc}\n")
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
