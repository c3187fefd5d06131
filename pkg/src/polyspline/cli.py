"""Command-line front end: ``polyspline <command> ...`` prints one JSON document.

Exit status is 0 on success, 1 when ``--method all`` finds disagreement and 2
on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Context, Decimal, localcontext
from fractions import Fraction

from .errors import ParseError, PolysplineError
from .exact import RadicalValue, RatMatrix, as_vector, format_rat
from .integrate import Polynomial, integrate_polynomial_hrep
from .oracle import mc_integrate, mc_volume
from .polytope import HPolytope, compute_volume, stacked_direction_matrix
from .problem_io import parse_problem
from .slices import SliceSpec, box_spline, box_moment_check, good_check, slice_volume
from .tpower import DirectionMatrix, certify_generic, eval_T_explicit, eval_T_recurrence

SEED_ENV = "POLYSPLINE_SEED"
COMMANDS = ("volume", "integrate", "slice", "good-check", "tpower", "boxspline", "moments")
EXACT_METHODS = {
    "volume": ("explicit", "recurrence", "lasserre", "brion"),
    "integrate": ("explicit",),
    "tpower": ("explicit", "recurrence"),
}
ORACLE_COMMANDS = ("volume", "integrate")


@dataclass
class JobSpec:
    command: str
    input: object
    method: str = "explicit"
    seed: int = 0
    c_override: tuple | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        allowed = self.methods()
        if self.method not in allowed:
            raise ValueError(f"method {self.method!r} is not valid for {self.command}; choose from {allowed}")

    def methods(self) -> tuple[str, ...]:
        exact = EXACT_METHODS.get(self.command)
        if exact is None:
            return ("explicit",)
        extra = ("oracle",) if self.command in ORACLE_COMMANDS else ()
        return exact + extra + ("all",)


def display_float(value) -> float:
    """Round-half-even to 12 significant digits; display only."""
    with localcontext() as ctx:
        ctx.prec = 40
        if isinstance(value, RadicalValue):
            d = Decimal(value.coeff.numerator) / Decimal(value.coeff.denominator) * Decimal(value.radicand).sqrt()
        else:
            q = Fraction(value)
            d = Decimal(q.numerator) / Decimal(q.denominator)
    return float(Context(prec=12, rounding=ROUND_HALF_EVEN).plus(d))


def value_doc(value) -> dict:
    rv = value if isinstance(value, RadicalValue) else RadicalValue(Fraction(value), 1)
    return {"coeff": format_rat(rv.coeff), "radicand": rv.radicand}


def _entry(method: str, value, diagnostics=()) -> dict:
    return {
        "value": value_doc(value),
        "float": display_float(value),
        "method": method,
        "diagnostics": list(diagnostics),
    }


def _oracle_entry(est) -> dict:
    return {
        "method": "oracle",
        "mean": est.mean,
        "std_error": est.std_error,
        "samples": est.samples,
        "seed": est.seed,
        "diagnostics": [],
    }


def _combine(entries: list[dict], exact_values: list, oracle=None) -> dict:
    agree = len(set(exact_values)) <= 1
    if oracle is not None and exact_values:
        agree = agree and oracle.agrees(exact_values[0])
    return {"results": entries, "agreement": agree}


def _direction(M: RatMatrix) -> DirectionMatrix:
    return DirectionMatrix(M)


def _run_volume(job: JobSpec) -> dict:
    H: HPolytope = job.input
    methods = EXACT_METHODS["volume"] + ("oracle",) if job.method == "all" else (job.method,)
    entries, exact, oracle = [], [], None
    for m in methods:
        if m == "oracle":
            oracle = mc_volume(H, job.options.get("samples", 1_000_000), job.seed)
            entries.append(_oracle_entry(oracle))
            continue
        rep = compute_volume(H, m, seed=job.seed, c=job.c_override if m == "explicit" else None)
        entries.append(_entry(m, rep.value, rep.diagnostics))
        exact.append(rep.value)
    return entries[0] if len(entries) == 1 else _combine(entries, exact, oracle)


def _run_integrate(job: JobSpec) -> dict:
    H, p = job.input
    methods = ("explicit", "oracle") if job.method == "all" else (job.method,)
    entries, exact, oracle = [], [], None
    for m in methods:
        if m == "oracle":
            oracle = mc_integrate(H, p, job.options.get("samples", 1_000_000), job.seed)
            entries.append(_oracle_entry(oracle))
        else:
            notes: list[str] = []
            value = integrate_polynomial_hrep(H, p, notes=notes)
            entries.append(_entry(m, value, notes))
            exact.append(value)
    return entries[0] if len(entries) == 1 else _combine(entries, exact, oracle)


def _run_tpower(job: JobSpec) -> dict:
    M, x = job.input
    D = _direction(M)
    methods = ("explicit", "recurrence") if job.method == "all" else (job.method,)
    entries, exact = [], []
    for m in methods:
        notes: list[str] = []
        if m == "explicit":
            value = eval_T_explicit(D, x, job.c_override, notes=notes)
        else:
            value = eval_T_recurrence(D, x, seed=job.seed, notes=notes)
        entries.append(_entry(m, value, notes))
        exact.append(value)
    return entries[0] if len(entries) == 1 else _combine(entries, exact)


def run(job: JobSpec) -> dict:
    """Execute one job and return the output document."""
    cmd = job.command
    if job.c_override is not None:
        if cmd == "tpower":
            certify_generic(_direction(job.input[0]), job.c_override)
        elif cmd == "volume":
            certify_generic(stacked_direction_matrix(job.input)[0], job.c_override)
        else:
            raise ValueError(f"--c is not supported by {cmd}")
    if cmd == "volume":
        return _run_volume(job)
    if cmd == "integrate":
        return _run_integrate(job)
    if cmd == "tpower":
        return _run_tpower(job)
    if cmd == "slice":
        M, x = job.input
        return _entry("explicit", slice_volume(SliceSpec(M, x), job.seed))
    if cmd == "boxspline":
        M, x = job.input
        return _entry("explicit", box_spline(M, x, job.seed))
    if cmd == "good-check":
        rep = good_check(job.input, job.seed)
        return {
            "weights": [format_rat(q) for q in rep.weights],
            "center_value": format_rat(rep.center_value),
            "bound_ratio": format_rat(rep.bound_ratio),
            "holds": rep.holds,
            "equality": rep.equality,
            "float": display_float(rep.center_value),
        }
    rep = box_moment_check(job.input, job.options.get("grid", 10_000), job.seed)
    return {
        "weights": [format_rat(q) for q in rep.weights],
        "cells": rep.cells,
        "computed": {"mass": rep.mass, "half_mass": rep.half_mass, "second_moment": rep.second_moment},
        "targets": {"mass": rep.targets[0], "half_mass": rep.targets[1], "second_moment": rep.targets[2]},
        "max_deviation": rep.max_deviation,
    }


def _words(text: str, flag: str) -> tuple[Fraction, ...]:
    try:
        return as_vector(text.replace(",", " ").split())
    except PolysplineError:
        raise ParseError(flag, f"malformed rational list {text!r}") from None


def _directions(text: str) -> RatMatrix:
    rows = [_words(r, "--directions") for r in text.split(";") if r.strip()]
    if not rows:
        raise ParseError("--directions", "empty matrix")
    try:
        return RatMatrix(tuple(rows))
    except PolysplineError as exc:
        raise ParseError("--directions", str(exc)) from None


def _system(args) -> tuple[RatMatrix, tuple]:
    if args.system:
        return parse_problem(args.system, "system")
    if args.directions is None or args.point is None:
        raise ParseError("--system", "give --system FILE or both --directions and --point")
    M = _directions(args.directions)
    x = _words(args.point, "--point")
    if len(x) != M.nrows:
        raise ParseError("--point", f"has {len(x)} entries, expected {M.nrows}")
    return M, x


def _weights(args) -> tuple:
    if args.weights_file:
        return parse_problem(args.weights_file, "weights")
    if args.weights is None:
        raise ParseError("--weights", "missing weights")
    return _words(args.weights, "--weights")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyspline", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, methods=None):
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
        if methods:
            p.add_argument("--method", choices=methods, default=methods[0])

    def system_args(p):
        p.add_argument("--system", help='JSON file {"M": [[...]], "x": [...]}')
        p.add_argument("--directions", help='matrix rows separated by ";", e.g. "1 1 1"')
        p.add_argument("--point", help='point, e.g. "3/2"')

    def weight_args(p):
        p.add_argument("--weights", help='positive weights, e.g. "1 2 3"')
        p.add_argument("--weights-file", help='JSON file {"a": [...]}')

    p = sub.add_parser("volume", help="volume of an H-polytope")
    p.add_argument("--hrep", required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--c", help="generic vector for the explicit formula")
    common(p, ["explicit", "recurrence", "lasserre", "brion", "oracle", "all"])

    p = sub.add_parser("integrate", help="integral of a polynomial over an H-polytope")
    p.add_argument("--hrep", required=True)
    p.add_argument("--poly", help="polynomial JSON file")
    p.add_argument("--monomial", help="monomial JSON file")
    p.add_argument("--exponents", help='monomial exponents, e.g. "1 1"')
    p.add_argument("--samples", type=int, default=1_000_000)
    common(p, ["explicit", "oracle", "all"])

    p = sub.add_parser("slice", help="volume of an affine slice of the unit cube")
    system_args(p)
    common(p)

    p = sub.add_parser("good-check", help="exact check of the central-slice lower bound")
    weight_args(p)
    common(p)

    p = sub.add_parser("tpower", help="truncated power T(x|M)")
    system_args(p)
    p.add_argument("--c", help="generic vector for the explicit formula")
    common(p, ["explicit", "recurrence", "all"])

    p = sub.add_parser("boxspline", help="box spline B(x|M)")
    system_args(p)
    common(p)

    p = sub.add_parser("moments", help="quadrature moments of the centered box spline")
    weight_args(p)
    p.add_argument("--grid", type=int, default=10_000)
    common(p)
    return parser


def job_from_args(args) -> JobSpec:
    seed = args.seed if args.seed is not None else int(os.environ.get(SEED_ENV, "0"))
    method = getattr(args, "method", "explicit")
    c = _words(args.c, "--c") if getattr(args, "c", None) else None
    options: dict = {}
    cmd = args.command
    if cmd == "volume":
        data = parse_problem(args.hrep, "hrep")
        options["samples"] = args.samples
    elif cmd == "integrate":
        H = parse_problem(args.hrep, "hrep")
        if args.poly:
            poly = parse_problem(args.poly, "polynomial")
        elif args.monomial:
            poly = Polynomial.from_terms([(1, parse_problem(args.monomial, "monomial"))])
        elif args.exponents:
            try:
                exps = tuple(int(e) for e in args.exponents.replace(",", " ").split())
            except ValueError:
                raise ParseError("--exponents", f"malformed exponents {args.exponents!r}") from None
            poly = Polynomial.from_terms([(1, exps)])
        else:
            raise ParseError("--poly", "give --poly, --monomial or --exponents")
        data = (H, poly)
        options["samples"] = args.samples
    elif cmd in ("slice", "tpower", "boxspline"):
        data = _system(args)
    else:
        data = _weights(args)
        if cmd == "moments":
            options["grid"] = args.grid
    return JobSpec(cmd, data, method, seed, c, options)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = job_from_args(args)
        doc = run(job)
    except (PolysplineError, ValueError) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(err, indent=2))
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(doc, indent=2))
    return 0 if doc.get("agreement", True) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
