"""Command-line front end: ``betaint <command> ...``.

Output is human-readable by default; ``--json`` prints an envelope
``{"command", "inputs", "result", "version"}`` with floats written to 17
significant digits and rationals as ``"p/q"`` strings.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import __version__
from .beta_integrals import (
    BResult,
    DispatchPolicy,
    MethodTag,
    ParamSet,
    b_auto,
    b_general,
    b_series_4f3,
    b_series_c,
    moment_max,
    pm_inner,
    prob_exceeds_with_error,
)
from .combinatorics import TABLE_KINDS, IntParamSet, b_exact_rational, t_count, t_count_bruteforce, table_csv
from .errors import BudgetExceeded, ConstraintError, DomainError
from .oracles import b_montecarlo, b_quadrature
from .verify import Tolerances, random_params, run_battery
from .walks import WalkConfig, expected_exit_conditioned, simulate_conditioned

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4


class VerificationFailed(Exception):
    def __init__(self, payload):
        super().__init__("verification failed")
        self.payload = payload


# ---------------------------------------------------------------------------
# Serialization


def _plain(obj):
    """Reduce payloads to JSON types; Fractions become "p/q" strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, BResult):
        return _plain(obj.to_dict())
    if isinstance(obj, MethodTag):
        return obj.value
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    return obj


def dumps(obj) -> str:
    """JSON text with every float at 17 significant digits."""
    obj = _plain(obj)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return format(obj, ".17g") if not obj.is_integer() or abs(obj) >= 1e16 else format(obj, ".1f")
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, list):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {dumps(v)}" for k, v in obj.items()) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def envelope(command: str, inputs: dict, result) -> dict:
    return {"command": command, "inputs": _plain(inputs), "result": _plain(result), "version": __version__}


def _human(result) -> str:
    result = _plain(result)
    if isinstance(result, dict):
        lines = []
        for k, v in result.items():
            if isinstance(v, (dict, list)):
                v = json.dumps(v)
            lines.append(f"{k}: {v}")
        return "\n".join(lines)
    return str(result)


# ---------------------------------------------------------------------------
# Argument parsing


def _reals(count: int):
    def parse(text: str) -> list[float]:
        try:
            vals = [float(v) for v in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {text!r}")
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {len(vals)}")
        return vals

    return parse


def _ints(count: int):
    def parse(text: str) -> list[int]:
        try:
            vals = [int(v) for v in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated integers, got {text!r}")
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated integers, got {len(vals)}")
        return vals

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betaint", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON envelope instead of text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", parents=[common], help="P(X > max(Y, Z)), or P(X >= Y) with --pair")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--params", type=_reals(6), help="lam,lam',mu,mu',nu,nu'")
    group.add_argument("--pair", type=_reals(4), help="lam,lam',mu,mu' for P(X >= Y)")
    p.add_argument("--method", default="auto", choices=["auto", "kdf", "series4f3", "seriesc", "exact", "quadrature", "mc"])
    p.add_argument("--tol", type=float, default=1e-12, help="quadrature tolerance")
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("moment", parents=[common], help="E[max(Y, Z)^lam]")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--params", type=_reals(4), required=True, help="mu,mu',nu,nu'")

    p = sub.add_parser("inner", parents=[common], help="<p_m, p_n> with p_m(t) = I(m, m; t)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("count", parents=[common], help="number of qualifying X/Y/Z strings")
    p.add_argument("--params", type=_ints(6), required=True, help="l,l',m,m',n,n'")
    p.add_argument("--brute", action="store_true", help="also enumerate every string")

    p = sub.add_parser("table", parents=[common], help="triangular count table as CSV")
    p.add_argument("kind", choices=TABLE_KINDS)
    p.add_argument("--max", type=int, default=6, dest="max_row", help="largest m+n")

    p = sub.add_parser("exit", parents=[common], help="mean exit time of a conditioned lattice walk")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=0, help="simulated paths (0 skips the simulation)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", parents=[common], help="identity battery on random parameter sets")
    p.add_argument("--grid-size", type=int, default=50)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--tol", type=float, default=1e-8, help="tolerance against the independent oracle")
    p.add_argument("--workers", type=int, default=1)
    return parser


# ---------------------------------------------------------------------------
# Commands


def cmd_prob(args) -> tuple[dict, object]:
    if args.pair is not None:
        value, err = prob_exceeds_with_error(*args.pair)
        return {"pair": args.pair}, {"value": value, "abs_error_estimate": err}
    p = ParamSet(*args.params)
    inputs = {"params": list(p.as_tuple()), "method": args.method}
    if args.method == "auto":
        return inputs, b_auto(p)
    if args.method == "kdf":
        return inputs, b_general(p)
    if args.method == "series4f3":
        return inputs, b_series_4f3(p)
    if args.method == "seriesc":
        return inputs, b_series_c(p)
    if args.method == "exact":
        if not all(float(v).is_integer() for v in args.params):
            raise DomainError("--method exact needs integer parameters")
        q = b_exact_rational(IntParamSet(*(int(v) for v in args.params)))
        return inputs, {"value": q, "method": MethodTag.EXACT_RATIONAL, "float": float(q)}
    if args.method == "quadrature":
        inputs["tol"] = args.tol
        q = b_quadrature(p, args.tol)
        return inputs, BResult(q.value, MethodTag.QUADRATURE, q.abs_error_estimate, {"evaluations": q.evaluations})
    inputs.update(samples=args.samples, seed=args.seed, workers=args.workers)
    mc = b_montecarlo(p, args.samples, args.seed, args.workers)
    return inputs, BResult(mc.estimate, MethodTag.MONTE_CARLO, mc.stderr, {"samples": mc.samples, "seed": mc.seed})


def cmd_moment(args):
    return {"lam": args.lam, "params": args.params}, {"value": moment_max(args.lam, *args.params)}


def cmd_inner(args):
    return {"m": args.m, "n": args.n}, {"value": pm_inner(args.m, args.n)}


def cmd_count(args):
    p = IntParamSet(*args.params)
    result = {"count": t_count(p), "probability": b_exact_rational(p)}
    if args.brute:
        result["bruteforce"] = t_count_bruteforce(p)
    return {"params": args.params, "brute": args.brute}, result


def cmd_table(args):
    return {"kind": args.kind, "max": args.max_row}, table_csv(args.kind, args.max_row)


def cmd_exit(args):
    cfg = WalkConfig(args.M, args.N, args.m, args.n)
    inputs = {"M": cfg.M, "N": cfg.N, "m": cfg.m, "n": cfg.n}
    if args.samples <= 0:
        return inputs, {"analytic_mean": expected_exit_conditioned(cfg)}
    inputs.update(samples=args.samples, seed=args.seed, workers=args.workers)
    r = simulate_conditioned(cfg, args.samples, args.seed, args.workers)
    return inputs, {
        "analytic_mean": r.analytic_mean,
        "simulated_mean": r.simulated_mean,
        "simulated_stderr": r.simulated_stderr,
        "z_score": r.z_score,
    }


def cmd_verify(args):
    inputs = {"grid_size": args.grid_size, "seed": args.seed, "tol": args.tol}
    reports = run_battery(random_params(args.grid_size, args.seed), Tolerances(oracle=args.tol), workers=args.workers)
    checks = ("swap", "cyclicity", "min_max", "moment", "oracle")
    summary = {}
    for name in checks:
        vals = [r.residuals[name] for r in reports if r.residuals.get(name) is not None]
        summary[name] = {
            "max_residual": max(vals, default=0.0),
            "failures": sum(name in r.failed for r in reports),
            "skipped": len(reports) - len(vals),
        }
    result = {
        "passed": all(r.ok for r in reports),
        "checks": summary,
        "failures": [{"params": list(r.params), "failed": r.failed, "residuals": r.residuals} for r in reports if not r.ok],
    }
    if not result["passed"]:
        raise VerificationFailed((inputs, result))
    return inputs, result


COMMANDS = {
    "prob": cmd_prob,
    "moment": cmd_moment,
    "inner": cmd_inner,
    "count": cmd_count,
    "table": cmd_table,
    "exit": cmd_exit,
    "verify": cmd_verify,
}


def _emit(args, inputs, result) -> None:
    if args.json:
        print(dumps(envelope(args.command, inputs, result)))
    elif isinstance(result, str):
        sys.stdout.write(result)
    else:
        print(_human(result))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        inputs, result = COMMANDS[args.command](args)
    except VerificationFailed as exc:
        _emit(args, *exc.payload)
        return EXIT_VERIFY
    except (DomainError, ConstraintError, BudgetExceeded) as exc:
        print(f"betaint {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"betaint {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(args, inputs, result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
