"""Solver entry point: SMT-LIB2 on stdin, verdict on stdout.

Decision pipeline:

1. finite-model search at domain sizes 1 and 2 (where most counterexamples
   in this fragment live);
2. Herbrand grounding of the Skolemized clauses with DPLL, which refutes
   unsatisfiable sets and decides function-free sets exactly;
3. a resolution pass, whose saturation can certify satisfiability when
   grounding cannot;
4. finite-model search at the remaining domain sizes.

Budgets exhausted anywhere downgrade the answer to "unknown"; the solver
never guesses.  With --model a found structure is printed after "sat" as an
s-expression:

    (model
      (universe 2)
      (const a 0)
      (fun f 1 ((0) 1) ((1) 0))
      (pred P 1 (0) (1))
    )
"""

from __future__ import annotations

import argparse
import sys

from ..equiv import SigmaStructure
from .clausify import ClauseBlowup, clausify
from .herbrand import ground_refute
from .modelfind import search_size
from .resolution import refute
from .script import Problem, UnsupportedScript, parse_script
from .sexpr import SexprError


def _with_all_predicates(model: SigmaStructure, problem: Problem) -> SigmaStructure:
    preds = dict(model.predicate_interp)
    for name in problem.predicates:
        preds.setdefault(name, frozenset())
    return SigmaStructure(model.domain, model.constant_interp, preds, model.function_interp)


def solve_script(
    text: str,
    max_domain: int = 3,
    resolution_budget: int = 20_000,
    dpll_budget: int = 200_000,
) -> tuple[str, SigmaStructure | None]:
    """Decide a script; returns (answer, model-or-None)."""
    problem = parse_script(text)
    if not problem.assertions:
        return "sat", SigmaStructure(
            (0,),
            {c: 0 for c in problem.constants},
            {p: frozenset() for p in problem.predicates},
            {},
        )
    for d in (1, 2):
        if d > max_domain:
            break
        model, _complete = search_size(problem, d, dpll_budget)
        if model is not None:
            return "sat", model

    try:
        clauses = clausify(problem.assertions)
    except ClauseBlowup:
        clauses = None
    if clauses is not None:
        answer, model = ground_refute(clauses, dpll_budget=dpll_budget)
        if answer == "unsat":
            return "unsat", None
        if answer == "sat":
            return "sat", _with_all_predicates(model, problem) if model else None
        outcome = refute(clauses, max_generated=resolution_budget)
        if outcome == "unsat":
            return "unsat", None
        if outcome == "sat":
            # Saturation certifies satisfiability even when no small finite
            # model exists; no structure is available in that case.
            return "sat", None

    for d in range(3, max_domain + 1):
        if problem.functions and d > 2:
            break
        model, _complete = search_size(problem, d, dpll_budget)
        if model is not None:
            return "sat", model
    return "unknown", None


def format_model(s: SigmaStructure) -> str:
    lines = ["(model", f"  (universe {len(s.domain)})"]
    for name in sorted(s.constant_interp):
        lines.append(f"  (const {name} {s.constant_interp[name]})")
    for name in sorted(s.function_interp):
        table = s.function_interp[name]
        arity = len(next(iter(table))) if table else 0
        entries = " ".join(
            f"(({' '.join(map(str, point))}) {value})" for point, value in sorted(table.items())
        )
        lines.append(f"  (fun {name} {arity} {entries})")
    for name in sorted(s.predicate_interp):
        tuples = s.predicate_interp[name]
        arity = len(next(iter(tuples))) if tuples else 0
        entries = " ".join(f"({' '.join(map(str, t))})" for t in sorted(tuples))
        lines.append(f"  (pred {name} {arity}{' ' + entries if entries else ''})")
    lines.append(")")
    return "\n".join(lines)


def cli(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="folbench-solver",
        description="Decide an SMT-LIB2 script over one uninterpreted sort (stdin -> stdout).",
    )
    ap.add_argument("--model", action="store_true", help="print a witness structure after sat")
    ap.add_argument("--max-domain", type=int, default=3, help="finite-model search bound")
    ap.add_argument("--resolution-budget", type=int, default=20_000)
    ap.add_argument("--dpll-budget", type=int, default=200_000)
    args = ap.parse_args(argv)

    text = sys.stdin.read()
    try:
        answer, model = solve_script(
            text,
            max_domain=args.max_domain,
            resolution_budget=args.resolution_budget,
            dpll_budget=args.dpll_budget,
        )
    except (UnsupportedScript, SexprError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(answer)
    if args.model and model is not None:
        print(format_model(model))
    return 0


def entrypoint() -> None:
    sys.exit(cli())
