"""Command-line entry point: solve, gen, analyze, trace, check.

Exit status: 0 for SAT or a finished analysis, 20 for UNSAT, 1 for usage,
input or I/O errors, 2 when ``check`` finds a disagreement.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from . import __version__
from .descriptor import MergeLimitError, solve, write_trace_csv
from .dimacs import DimacsDocument, DimacsError, emit_dimacs, parse_dimacs
from .oracle import brute_force
from .preprocess import apply_model_back, permute_trajectories, sort_problem, write_var_map
from .problem import Problem
from .randmodel import (
    LITERATURE_THRESHOLD,
    AnalyticCurve,
    GenSpec,
    InfeasibleSpecError,
    as_fraction,
    corollary_alpha,
    gen_exact_uniform,
    m_alpha_curve,
    m_alpha_profile,
    solution_decay_curve,
    threshold_exact,
)
from .tmatrix import ENUMERATION_CUTOFF, EnumerationLimitError

EXIT_SAT = 0
EXIT_USAGE = 1
EXIT_CHECK = 2
EXIT_UNSAT = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunReport:
    decision: str
    witness: Optional[list]
    max_len: int
    trace_path: Optional[str]
    wall_time: float


def _read_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_dimacs(text).to_problem()
    except DimacsError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _open_out(path: str):
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        return open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _alpha(text: str):
    try:
        a = as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a ratio: {text!r}") from None
    if a <= 0:
        raise argparse.ArgumentTypeError("alpha must be positive")
    return a


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def cmd_solve(args) -> int:
    original = _read_problem(args.input)
    start = time.perf_counter()
    if args.preprocess == "sort":
        work = sort_problem(original)
    elif args.preprocess == "sort+permute":
        work = permute_trajectories(original)
    else:
        work = original
    try:
        result = solve(work, count_models=args.trace is not None, max_steps=args.max_steps)
    except MergeLimitError as exc:
        print("s UNKNOWN")
        print(f"descsat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = time.perf_counter() - start

    witness = None
    if result.sat:
        witness = list(apply_model_back(work, result.witness()))
        if not original.satisfied_by(witness):
            print("c internal error: witness does not satisfy the input", file=sys.stderr)
            return EXIT_CHECK
    if args.trace:
        with _open_out(args.trace) as fh:
            write_trace_csv(result.trace, fh)
    if args.var_map:
        with _open_out(args.var_map) as fh:
            write_var_map(work, fh)
    report = RunReport(result.decision, witness, result.max_len(), args.trace, elapsed)
    if args.report:
        with _open_out(args.report) as fh:
            json.dump(asdict(report), fh, indent=2)
            fh.write("\n")

    print("s SATISFIABLE" if result.sat else "s UNSATISFIABLE")
    print(f"c max_len {report.max_len}")
    print(f"c time {elapsed:.3f}s")
    if args.witness and witness is not None:
        lits = [i if b else -i for i, b in enumerate(witness, start=1)]
        print("v " + " ".join(map(str, lits)) + " 0")
    return EXIT_SAT if result.sat else EXIT_UNSAT


def cmd_gen(args) -> int:
    try:
        spec = GenSpec(args.n, args.alpha, args.seed)
    except InfeasibleSpecError as exc:
        raise UsageError(str(exc)) from None
    p = gen_exact_uniform(spec)
    doc = DimacsDocument.from_problem(
        p, [f"exact-uniform n={spec.n} alpha={spec.alpha} seed={spec.seed}"]
    )
    with _open_out(args.out) as fh:
        fh.write(emit_dimacs(doc))
    return EXIT_SAT


def _log2_expected_solutions(n: int, m: int) -> float:
    return math.log2(7) + (n - 3) * math.log2(7 / 4) + (m - n + 2) * math.log2(7 / 8)


def cmd_analyze(args) -> int:
    n, alpha = args.n, args.alpha
    if n < 3:
        raise UsageError("analyze needs n >= 3")
    try:
        os.makedirs(args.out_dir, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {args.out_dir}: {exc.strerror}") from None

    curve = m_alpha_curve(n, alpha)
    ratios = [k / 20 for k in range(1, 201)]
    expected = AnalyticCurve(
        "expected_solutions_log2",
        [(r, _log2_expected_solutions(n, max(1, round(r * n)))) for r in ratios],
    )
    thresholds = AnalyticCurve(
        "thresholds",
        [
            ("exact_uniform", threshold_exact()),
            ("usual_model", corollary_alpha(threshold_exact())),
            ("literature", LITERATURE_THRESHOLD),
        ],
    )
    outputs = {
        "m_alpha.csv": m_alpha_profile(n, alpha),
        "m_alpha_curve.csv": curve,
        "expected_solutions_log2.csv": expected,
        "thresholds.csv": thresholds,
    }
    for name, c in outputs.items():
        with _open_out(os.path.join(args.out_dir, name)) as fh:
            c.write_csv(fh)
    k, peak = curve.peak()
    print(f"c M_alpha peak {peak:.3f} at k={k}")
    print(f"c threshold {threshold_exact():.8f}")
    return EXIT_SAT


def cmd_trace(args) -> int:
    p = _read_problem(args.input)
    try:
        curve = solution_decay_curve(p)
    except EnumerationLimitError as exc:
        raise UsageError(str(exc)) from None
    with _open_out(args.out) as fh:
        curve.write_csv(fh)
    return EXIT_SAT


def cmd_check(args) -> int:
    if args.n > ENUMERATION_CUTOFF:
        raise UsageError(f"n={args.n} exceeds the oracle cutoff {ENUMERATION_CUTOFF}")
    try:
        GenSpec(args.n, args.alpha, args.seed)
    except InfeasibleSpecError as exc:
        raise UsageError(str(exc)) from None
    failures = 0
    sat_count = 0
    for k in range(args.count):
        p = gen_exact_uniform(GenSpec(args.n, args.alpha, args.seed + k))
        res = solve(p, count_models=False)
        ref = brute_force(p)
        ok = res.sat == ref.sat
        if ok and res.sat:
            ok = p.satisfied_by(res.witness())
            if ok and ref.models is not None:
                ok = res.descriptor.models() == ref.models
        if not ok:
            failures += 1
            print(f"c disagreement at seed {args.seed + k}: "
                  f"solver {res.decision}, oracle {ref.decision}")
        sat_count += ref.sat
    print(f"c checked {args.count} instances, {sat_count} SAT, {failures} disagreements")
    return EXIT_CHECK if failures else EXIT_SAT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="descsat", description="3-CNF solving with functional descriptors")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="decide a DIMACS 3-CNF instance")
    p.add_argument("--input", required=True)
    p.add_argument("--preprocess", choices=("none", "sort", "sort+permute"), default="none")
    p.add_argument("--trace", metavar="CSV", help="per-clause descriptor lengths")
    p.add_argument("--witness", action="store_true", help="print a satisfying assignment")
    p.add_argument("--var-map", metavar="FILE", help="write the relabeling sidecar")
    p.add_argument("--report", metavar="JSON", help="write the run report")
    p.add_argument("--max-steps", type=_positive, default=10**6,
                   help="level merges allowed per clause before giving up")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="exact-uniform random instance")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--alpha", type=_alpha, required=True, help="ratio m/n, e.g. 8/3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="analytic curves as CSV")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("trace", help="model count after each clause prefix")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("check", help="compare the solver with brute force")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--count", type=_positive, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"descsat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
