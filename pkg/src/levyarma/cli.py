"""Batch command-line front-end.

Subcommands mirror the library modules one-to-one:

    coeffs        causal c_j stream                       (json|csv)
    depend        I(X_0, X_n; z1, z2) over a lag range    (json|csv)
    codiff        codifference -I(.;1,-1)                 (json|csv)
    findist       bivariate stable spectral measure       (json|csv)
    simulate      stable sample paths                     (bin|csv)
    verify-rates  asymptotic decay-rate verification       (json|csv)
    limits        the g1/g2/g3 limit integrals            (json)

All floating point output is printed with 17 significant digits so values
round-trip exactly.  Exit codes: 0 success, 2 validation error,
3 numerical-tolerance failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import asymptotics, dependence, findist, simulate
from .coeffs import ModelSpec, coefficients
from .errors import (BoundaryRegimeError, EstimationError, LevyArmaError,
                     ModelValidationError, QuadratureError, TruncationError)
from .innovations import IDSpec, StableSpec, innovation_from_dict

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64


def _fmt_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def dumps17(obj, indent: int = 0) -> str:
    """JSON with every float printed to 17 significant digits."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = ",".join(f"\n{pad}  {json.dumps(str(k))}: {dumps17(v, indent + 2)}"
                         for k, v in obj.items())
        return "{" + items + f"\n{pad}}}" if obj else "{}"
    if isinstance(obj, (list, tuple)):
        items = ",".join(f"\n{pad}  {dumps17(v, indent + 2)}" for v in obj)
        return "[" + items + f"\n{pad}]" if obj else "[]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(obj)


class _Parser(argparse.ArgumentParser):
    """argparse that exits 64 on usage errors, per the CLI contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_lags(text: str) -> list:
    text = text.strip()
    for sep in ("..", ":"):
        if sep in text:
            parts = text.split(sep)
            if len(parts) == 2:
                a, b = int(parts[0]), int(parts[1])
                return list(range(a, b + 1))
            if len(parts) == 3 and sep == ":":
                a, b, st = int(parts[0]), int(parts[1]), int(parts[2])
                return list(range(a, b + 1, st))
    if "," in text:
        return [int(v) for v in text.split(",")]
    return [int(text)]


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("LEVYARMA_THREADS")
    return max(1, int(env)) if env else 1


def _pmap(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_model(args) -> ModelSpec:
    return ModelSpec.from_json(args.model)


def _load_innovation(args):
    return innovation_from_dict(json.loads(args.innov))


def _maybe_recenter(model: ModelSpec, innov):
    """FARIMA existence for 1 < eta <= 2 and d > 0 requires centered
    innovations with gamma = -int_{|x|>1} x nu(dx); enforce and warn."""
    if not (isinstance(innov, IDSpec) and model.d > 0.0 and innov.eta > 1.0):
        return innov
    from scipy.integrate import quad
    dens = innov.levy_density
    mp, _ = quad(lambda x: float(dens(x)) * x, 1.0, np.inf, limit=300)
    mm, _ = quad(lambda x: float(dens(-x)) * x, 1.0, np.inf, limit=300)
    target = -(mp - mm)
    if abs(innov.gamma - target) < 1e-12:
        return innov
    print(f"warning: recentered drift gamma from {innov.gamma:g} to {target:.6g} "
          "(FARIMA with d > 0 requires zero-mean innovations)", file=sys.stderr)
    return IDSpec(levy_density=innov.levy_density, eta=innov.eta, gamma=target,
                  tail_cut=innov.tail_cut, tail_mass=innov.tail_mass,
                  heavy_tail=innov.heavy_tail, name=innov.name)


# ---------------------------------------------------------------------------
# Subcommand handlers

def _cmd_coeffs(args) -> int:
    model = _load_model(args)
    stream = coefficients(model, args.N)
    if args.format == "csv":
        _emit(stream.to_csv(), args.output)
    else:
        out = {"N": stream.N, "tail_bound": stream.tail_bound,
               "values": [float(v) for v in stream.values]}
        _emit(dumps17(out), args.output)
    return EXIT_OK


def _cmd_depend(args) -> int:
    model = _load_model(args)
    innov = _maybe_recenter(model, _load_innovation(args))
    lags = _parse_lags(args.n)
    z1s = args.z1 or [1.0]
    z2s = args.z2 or [1.0]
    combos = [(n, z1, z2) for n in lags for z1 in z1s for z2 in z2s]
    work = lambda c: dependence.compute_dependence(model, innov, c[0], c[1], c[2], args.N)
    results = _pmap(work, combos, _threads(args))
    rows = [r.to_dict() for r in results]
    if args.format == "csv":
        lines = ["n,z1,z2,re,im,err"]
        lines += [f"{r['n']},{r['z1']:.17g},{r['z2']:.17g},{r['re']:.17g},"
                  f"{r['im']:.17g},{r['err']:.17g}" for r in rows]
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(dumps17(rows), args.output)
    return EXIT_OK


def _cmd_codiff(args) -> int:
    model = _load_model(args)
    innov = _maybe_recenter(model, _load_innovation(args))
    lags = _parse_lags(args.n)
    work = lambda n: dependence.codifference(model, innov, n, args.N)
    results = _pmap(work, lags, _threads(args))
    rows = [{"n": r.n, "re": float(r.value.real), "im": float(r.value.imag),
             "err": r.err} for r in results]
    if args.format == "csv":
        lines = ["n,re,im,err"]
        lines += [f"{r['n']},{r['re']:.17g},{r['im']:.17g},{r['err']:.17g}"
                  for r in rows]
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(dumps17(rows), args.output)
    return EXIT_OK


def _cmd_findist(args) -> int:
    model = _load_model(args)
    innov = _load_innovation(args)
    if not isinstance(innov, StableSpec):
        raise ModelValidationError(
            "findist on the CLI supports stable innovations; RAC laws are "
            "library-API only")
    lags = _parse_lags(args.n)
    if len(lags) != 1:
        raise ModelValidationError("findist takes a single lag")
    atoms = findist.stable_spectral(model, innov, lags[0], args.N)
    if args.format == "csv":
        _emit(atoms.to_csv(), args.output)
    else:
        _emit(dumps17(atoms.to_dict()), args.output)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    model = _load_model(args)
    innov = _load_innovation(args)
    if not isinstance(innov, StableSpec):
        raise ModelValidationError("simulate supports stable innovations only")
    batch = simulate.simulate_paths(model, innov, args.replicates, args.length,
                                    trunc_M=args.trunc_M, seed=args.seed,
                                    mode=args.mode)
    if args.format == "csv":
        if args.output:
            batch.save_csv(args.output)
        else:
            batch.save_csv(sys.stdout)
    else:
        if not args.output:
            raise ModelValidationError("binary path export requires --output")
        batch.save_binary(args.output)
    return EXIT_OK


def _cmd_verify_rates(args) -> int:
    model = _load_model(args)
    innov = _maybe_recenter(model, _load_innovation(args))
    grid = _parse_lags(args.n_grid)
    report = asymptotics.verify_rates(model, innov, args.z1, args.z2, grid,
                                       N=args.N)
    if args.format == "csv":
        _emit(asymptotics.report_to_csv(report), args.output)
    else:
        _emit(dumps17(report), args.output)
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def _cmd_limits(args) -> int:
    val, err = asymptotics.limit_integral(args.which, args.z1, args.z2,
                                          args.alpha, args.d)
    _emit(dumps17({"which": args.which, "z1": args.z1, "z2": args.z2,
                   "alpha": args.alpha, "d": args.d, "value": val, "err": err}),
          args.output)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="levyarma",
                     description="ARMA/FARIMA dependence under stable and "
                                 "infinitely divisible innovations")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap for lag grids (env LEVYARMA_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, innov=True):
        p.add_argument("--model", required=True, help='{"phi":[...],"theta":[...],"d":0}')
        if innov:
            p.add_argument("--innov", required=True,
                           help='{"kind":"stable",...} or {"kind":"id",...}')
        p.add_argument("--N", type=int, default=None, help="series truncation")
        p.add_argument("--output", default=None)

    p = sub.add_parser("coeffs", help="causal MA(inf) coefficients")
    p.add_argument("--model", required=True)
    p.add_argument("--N", type=int, required=True, help="compute c_0..c_N")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_coeffs)

    p = sub.add_parser("depend", help="I(X_0,X_n; z1,z2) over lags")
    common(p)
    p.add_argument("--n", required=True, help='lag or inclusive range "a..b"')
    p.add_argument("--z1", type=float, action="append")
    p.add_argument("--z2", type=float, action="append")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_depend)

    p = sub.add_parser("codiff", help="codifference -I(.;1,-1)")
    common(p)
    p.add_argument("--n", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_codiff)

    p = sub.add_parser("findist", help="bivariate stable spectral measure")
    common(p)
    p.add_argument("--n", required=True, help="single lag")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_findist)

    p = sub.add_parser("simulate", help="stable sample paths")
    common(p)
    p.add_argument("--replicates", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--trunc-M", dest="trunc_M", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("auto", "recursion", "ma"), default="auto")
    p.add_argument("--format", choices=("bin", "csv"), default="bin")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify-rates", help="asymptotic rate verification")
    common(p)
    p.add_argument("--n-grid", dest="n_grid", required=True,
                   help='lag grid "a:b", "a..b" or comma list')
    p.add_argument("--z1", type=float, default=1.0)
    p.add_argument("--z2", type=float, default=1.0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_verify_rates)

    p = sub.add_parser("limits", help="g1/g2/g3 limit integrals")
    p.add_argument("--which", choices=("g1", "g2", "g3"), required=True)
    p.add_argument("--z1", type=float, default=1.0)
    p.add_argument("--z2", type=float, default=1.0)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_limits)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ModelValidationError, BoundaryRegimeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (QuadratureError, TruncationError, EstimationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LevyArmaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
