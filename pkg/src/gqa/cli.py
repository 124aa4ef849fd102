"""Command-line entry point.

Exit codes are part of the interface: 0 success (or "equal"), 1 not-equal
(or failed checks), 2 malformed input, 3 infeasible observation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .axioms import check_axioms
from .diagram import ArityMismatch, DiagramSyntaxError, export_dot, parse_diagram
from .gpl import (GplSyntaxError, GplTypeError, InfeasibleObservation, infer,
                  parse_gpl)
from .linalg import DimensionMismatch
from .ols import load_problem_csv, solve_ols
from .quadrel import interpret, rels_equal
from .quadstate import eval_state, state_to_dict, state_to_json

STRUCTURAL_TOL = 1e-9
VERDICT_TOL = 1e-6


def _fmt(x: float) -> str:
    if x == float("inf"):
        return "inf"
    return f"{x:.12g}"


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _interpret_file(path: str):
    return interpret(parse_diagram(_read(path)))


def cmd_eval(args) -> int:
    morphism = _interpret_file(args.diagram)
    point = np.array([float(tok) for tok in args.point.split(",")] if args.point else [])
    total = morphism.m + morphism.n
    if point.shape[0] != total:
        raise DimensionMismatch(
            f"diagram denotes a state on {total} wires, point has {point.shape[0]}")
    value = eval_state(morphism.name, point)
    if args.json:
        print(json.dumps({"value": "inf" if value == float("inf") else value}))
    else:
        print("inf" if value == float("inf") else repr(value))
    return 0


def cmd_normalize(args) -> int:
    morphism = _interpret_file(args.diagram)
    print(state_to_json(morphism.name))
    return 0


def cmd_eq(args) -> int:
    fa = _interpret_file(args.left)
    fb = _interpret_file(args.right)
    same = rels_equal(fa, fb, args.tol if args.tol is not None else VERDICT_TOL)
    print("equal" if same else "not-equal")
    return 0 if same else 1


def cmd_infer(args) -> int:
    result = infer(parse_gpl(_read(args.program)))
    doc = {"posterior": state_to_dict(result.posterior), "score": result.score}
    print(json.dumps(doc, sort_keys=True))
    if not args.json:
        post = result.posterior
        mu = post.mu[0] if post.n == 1 else post.mu.tolist()
        sig = post.sigma[0, 0] if post.n == 1 else post.sigma.tolist()
        mu_s = _fmt(mu) if post.n == 1 else json.dumps(mu)
        sig_s = _fmt(sig) if post.n == 1 else json.dumps(sig)
        line = f"posterior = N({mu_s}, {sig_s})"
        if post.fibre.rank:
            line += f" + fibre of rank {post.fibre.rank}"
        line += f", score = {_fmt(result.score)}"
        print(line)
    return 0


def cmd_ols(args) -> int:
    problem = load_problem_csv(args.csv)
    x_hat, cost = solve_ols(problem)
    if args.json:
        print(json.dumps({"x_hat": [float(v) for v in x_hat],
                          "residual_cost": cost,
                          "design_injective": problem.design_injective}))
    else:
        print(f"x_hat = [{', '.join(_fmt(v) for v in x_hat)}]")
        print(f"residual_cost = {_fmt(cost)}")
    return 0


def cmd_axioms_check(args) -> int:
    results = check_axioms(tol=args.tol if args.tol is not None else STRUCTURAL_TOL)
    failures = 0
    for case, ok in results:
        print(f"{'PASS' if ok else 'FAIL'}  {case.label()}")
        failures += 0 if ok else 1
    print(f"{len(results) - failures}/{len(results)} axiom cases passed")
    return 0 if failures == 0 else 1


def cmd_export_dot(args) -> int:
    text = export_dot(parse_diagram(_read(args.diagram)))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gqa",
        description="Evaluate, normalize, compare and run inference on "
                    "quadratic-algebra diagrams.")
    parser.add_argument("--tol", type=float, default=None,
                        help="override the tolerance (default 1e-9 structural, "
                             "1e-6 for equality verdicts)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed reserved for sampling commands")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a diagram's state at a point")
    p.add_argument("diagram")
    p.add_argument("--point", default="", help="comma-separated coordinates")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("normalize", help="print the canonical state as JSON")
    p.add_argument("diagram")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("eq", help="decide semantic equality of two diagrams")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("infer", help="run exact inference on a program")
    p.add_argument("program")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("ols", help="solve a least-squares problem from CSV")
    p.add_argument("csv")
    p.set_defaults(func=cmd_ols)

    p = sub.add_parser("axioms-check", help="run the equational soundness suite")
    p.set_defaults(func=cmd_axioms_check)

    p = sub.add_parser("export-dot", help="write a Graphviz rendering")
    p.add_argument("diagram")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleObservation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DiagramSyntaxError, GplSyntaxError, GplTypeError, ArityMismatch,
            DimensionMismatch, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
