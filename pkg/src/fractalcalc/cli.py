"""Command-line front end.

Every command writes its primary artifact (CSV or JSON) to standard output or
to ``--out``, and optionally a run manifest (``--manifest``) recording the
resolved parameters and a SHA-256 checksum of the artifact. Reals are written
with round-trip precision, so equal manifests imply byte-identical outputs.

Exit status is 0 on success, 2 for invalid input and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

from fractalcalc import __version__
from fractalcalc.errors import DomainError, NumericalFailure
from fractalcalc.integrals import (
    FractalTerm,
    Polynomial,
    integrate_recursive,
    integrate_riemann,
    integrate_sum,
    parse_gbar,
)
from fractalcalc.lfd import SampledFunction, ScaleLadder, estimate_critical_order, lfd_at
from fractalcalc.sets import SelfSimilarSet, make_middle_p_cantor, refine
from fractalcalc.solver import problem_from_dict, solve
from fractalcalc.staircase import StaircaseEvaluator

EXIT_INPUT = 2
EXIT_NUMERIC = 3


@dataclass
class RunManifest:
    command: str
    parameters: dict[str, Any]
    version: str = __version__
    checksum: str = ""
    extra: dict[str, Any] = field(default_factory=dict)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]], quote: bool = False) -> str:
    # str(float) is the shortest round-trip representation
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    writer = csv.writer(
        buf,
        lineterminator="\n",
        quoting=csv.QUOTE_NONNUMERIC if quote else csv.QUOTE_MINIMAL,
    )
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(args: argparse.Namespace, text: str, manifest: RunManifest) -> None:
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)

    if args.manifest is not None:
        manifest.checksum = hashlib.sha256(text.encode()).hexdigest()
        Path(args.manifest).write_text(_json_text(asdict(manifest)))


def _params(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"func", "out", "manifest"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# {{{ set construction


def _load_set(args: argparse.Namespace) -> SelfSimilarSet:
    if getattr(args, "set", None) is not None:
        try:
            data = json.loads(Path(args.set).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read set description {args.set}: {exc}") from exc
        return SelfSimilarSet.from_dict(data)
    return make_middle_p_cantor(args.p, tuple(args.ambient))


def _add_set_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=float, default=3.0, help="middle-1/p Cantor set (p > 2)")
    parser.add_argument(
        "--ambient", type=float, nargs=2, default=[0.0, 1.0], metavar=("A", "B")
    )
    parser.add_argument("--set", help="JSON set description (overrides --p/--ambient)")


# }}}


# {{{ commands


def cmd_set(args: argparse.Namespace) -> int:
    cset = _load_set(args)
    cover = refine(cset, args.depth)

    if args.json is not None:
        Path(args.json).write_text(_json_text(cset.to_dict()))

    text = _csv_text(
        ["lo", "hi", "address"],
        [(iv.lo, iv.hi, iv.address) for iv in cover.intervals],
        quote=True,
    )
    _emit(args, text, RunManifest("set", _params(args)))
    return 0


def cmd_staircase(args: argparse.Namespace) -> int:
    cset = _load_set(args)
    x, p = StaircaseEvaluator(cset).tabulate(args.grid)

    text = _csv_text(["x", "P"], [(float(xi), float(pi)) for xi, pi in zip(x, p)])
    _emit(args, text, RunManifest("staircase", _params(args), extra={"dimension": cset.dimension}))
    return 0


def _parse_term(spec: Sequence[str]) -> FractalTerm:
    gbar_name, p, a, b = spec
    try:
        cset = make_middle_p_cantor(float(p), (float(a), float(b)))
    except ValueError as exc:
        raise DomainError(f"malformed --term {' '.join(spec)}: {exc}") from exc
    gbar = parse_gbar(gbar_name)
    return FractalTerm(gbar, cset, gbar.lipschitz_bound(cset.ambient))


def cmd_integrate(args: argparse.Namespace) -> int:
    interval = tuple(args.range) if args.range is not None else None

    if args.term:
        terms = [_parse_term(t) for t in args.term]
        if args.method != "riemann":
            raise DomainError("sums of terms only support --method riemann")
        result = integrate_sum(terms, interval, args.depth)
    else:
        cset = _load_set(args)
        gbar = parse_gbar(args.gbar)
        if args.lipschitz == "auto":
            lipschitz = gbar.lipschitz_bound(cset.ambient) if isinstance(gbar, Polynomial) else None
        elif args.lipschitz == "none":
            lipschitz = None
        else:
            try:
                lipschitz = float(args.lipschitz)
            except ValueError:
                raise DomainError(f"--lipschitz expects a number, auto or none: got {args.lipschitz!r}") from None
        term = FractalTerm(gbar, cset, lipschitz)

        if args.method == "riemann":
            result = integrate_riemann(term, interval, args.depth)
        else:
            if interval is not None:
                raise DomainError("--method recursive integrates over the full ambient interval only")
            result = integrate_recursive(term, args.depth)

    _emit(args, _json_text(result.to_dict()), RunManifest("integrate", _params(args)))
    return 0


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        data = json.loads(Path(args.problem).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read problem file {args.problem}: {exc}") from exc

    problem, depth = problem_from_dict(data)
    solution = solve(problem, depth)
    rows = solution.tabulate(args.grid)

    text = _csv_text(["x", "y", "lower", "upper"], rows)
    extra = {
        "problem": data,
        "blowup": solution.blowup,
        "blowup_left": solution.blowup_left,
        "truncated": solution.blowup is not None or solution.blowup_left is not None,
        "equilibrium": solution.equilibrium,
        "validity": [solution.validity.lo, solution.validity.hi],
        "diagnostics": list(solution.diagnostics),
    }
    for note in solution.diagnostics:
        print(f"fractalcalc solve: {note}", file=sys.stderr)

    _emit(args, text, RunManifest("solve", _params(args), extra=extra))
    return 0


def _builtin_function(spec: str) -> Any:
    kind, _, value = spec.partition(":")
    try:
        number = float(value)
    except ValueError:
        raise DomainError(f"malformed --builtin {spec!r}") from None

    if kind == "power":
        beta = number

        def power(t: float) -> float:
            return abs(t) ** beta

        return power
    if kind == "staircase":
        return StaircaseEvaluator(make_middle_p_cantor(number))

    raise DomainError(f"unknown builtin {kind!r} (expected power:beta or staircase:p)")


def cmd_lfd(args: argparse.Namespace) -> int:
    if (args.input is None) == (args.builtin is None):
        raise DomainError("exactly one of --input and --builtin is required")

    f = SampledFunction.from_csv(args.input) if args.input else _builtin_function(args.builtin)
    h0, rho, count = args.ladder
    ladder = ScaleLadder(float(h0), float(rho), int(count))

    if args.q is None:
        estimate = estimate_critical_order(f, args.at, ladder, args.side)
    else:
        estimate = lfd_at(f, args.at, args.q, ladder, args.side)

    _emit(args, _json_text(estimate.to_dict()), RunManifest("lfd", _params(args)))
    return 0


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractalcalc",
        description="Fractal calculus on self-similar Cantor-type sets.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Any, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--out", help="output file (default: standard output)")
        p.add_argument("--manifest", help="write a JSON run manifest to this file")
        return p

    p = add("set", cmd_set, "build a set and list its depth-n cover")
    _add_set_args(p)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--json", help="write the set description to this file")

    p = add("staircase", cmd_staircase, "tabulate the devil's staircase P_C")
    _add_set_args(p)
    p.add_argument("--grid", type=int, default=101)

    p = add("integrate", cmd_integrate, "fractal integral of gbar * 1_C")
    _add_set_args(p)
    p.add_argument("--gbar", default="one", help="one | x | x2 | poly:[c0,c1,...]")
    p.add_argument("--method", choices=["riemann", "recursive"], default="riemann")
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--range", type=float, nargs=2, metavar=("X0", "X1"))
    p.add_argument("--lipschitz", default="auto", help="number, auto (polynomials) or none")
    p.add_argument(
        "--term",
        nargs=4,
        action="append",
        metavar=("GBAR", "P", "A", "B"),
        help="add a term gbar * 1_C for a middle-1/p set on [A, B] (repeatable)",
    )

    p = add("solve", cmd_solve, "solve a separable LFDE from a problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--grid", type=int, default=101)

    p = add("lfd", cmd_lfd, "estimate a critical order or local fractional derivative")
    p.add_argument("--input", help="CSV samples with columns x,f")
    p.add_argument("--builtin", help="power:beta (|t|^beta) or staircase:p")
    p.add_argument("--at", type=float, required=True)
    p.add_argument("--q", type=float, help="order; omit to estimate the critical order only")
    p.add_argument(
        "--ladder",
        nargs=3,
        default=["1e-2", "0.5", "20"],
        metavar=("H0", "RHO", "COUNT"),
    )
    p.add_argument("--side", choices=["left", "right", "both"], default="right")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"fractalcalc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, ArithmeticError) as exc:
        print(f"fractalcalc {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"fractalcalc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
