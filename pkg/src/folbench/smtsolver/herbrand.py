"""Refutation by Herbrand grounding.

Clause variables are instantiated with ground terms from the Herbrand
universe, deepened one function application at a time, and the resulting
propositional set goes to DPLL.  An unsatisfiable ground subset refutes the
clause set at any depth.  For function-free clause sets the universe is just
the constants, grounding is exhaustive, and a propositional model converts
directly into a finite structure, so satisfiability is decided exactly.
"""

from __future__ import annotations

from itertools import product

from ..equiv import SigmaStructure
from .clausify import Clause, TermT, collect_symbols
from .sat import BudgetHit, dpll


def _herbrand_terms(consts: list[str], funcs: dict[str, int], depth: int, cap: int) -> list[TermT]:
    terms: list[TermT] = [("c", name) for name in consts]
    frontier = list(terms)
    for _ in range(depth - 1):
        new: list[TermT] = []
        for name in sorted(funcs):
            arity = funcs[name]
            for args in product(terms, repeat=arity):
                if any(a in frontier for a in args):
                    candidate = ("f", name, args)
                    if candidate not in terms and candidate not in new:
                        new.append(candidate)
                        if len(terms) + len(new) >= cap:
                            return terms + new
        terms += new
        frontier = new
        if not new:
            break
    return terms


def _instantiate(clause: Clause, terms: list[TermT], cap: int) -> list[frozenset] | None:
    variables = sorted({a[1] for _, _, args in clause for a in _vars_of(args)})
    if not variables:
        return [clause]
    if len(terms) ** len(variables) > cap:
        return None
    out = []
    for values in product(terms, repeat=len(variables)):
        subst = dict(zip(variables, values))
        out.append(
            frozenset(
                (sign, pred, tuple(_subst(a, subst) for a in args))
                for sign, pred, args in clause
            )
        )
    return out


def _vars_of(args) -> list[TermT]:
    out = []
    for a in args:
        if a[0] == "v":
            out.append(a)
        elif a[0] == "f":
            out.extend(_vars_of(a[2]))
    return out


def _subst(t: TermT, subst: dict[str, TermT]) -> TermT:
    if t[0] == "v":
        return subst[t[1]]
    if t[0] == "f":
        return ("f", t[1], tuple(_subst(a, subst) for a in t[2]))
    return t


def ground_refute(
    clauses: list[Clause],
    max_depth: int = 3,
    term_cap: int = 48,
    instance_cap: int = 60_000,
    dpll_budget: int = 400_000,
) -> tuple[str, SigmaStructure | None]:
    """Returns ("unsat", None), ("sat", model) for function-free sets,
    or ("unknown", None)."""
    consts_set, funcs, _preds = collect_symbols(clauses)
    consts = sorted(consts_set) or ["_h0"]
    function_free = not funcs
    depth_limit = 1 if function_free else max_depth
    for depth in range(1, depth_limit + 1):
        terms = _herbrand_terms(consts, funcs, depth, term_cap)
        ground: list[frozenset] = []
        overflow = False
        for clause in clauses:
            instances = _instantiate(clause, terms, instance_cap)
            if instances is None or len(ground) + len(instances) > instance_cap:
                overflow = True
                break
            ground.extend(instances)
        if overflow:
            return "unknown", None
        atom_ids: dict[tuple, int] = {}
        cnf: list[tuple[int, ...]] = []
        for clause in ground:
            lits = []
            for sign, pred, args in clause:
                key = (pred, args)
                if key not in atom_ids:
                    atom_ids[key] = len(atom_ids) + 1
                lits.append(atom_ids[key] if sign else -atom_ids[key])
            cnf.append(tuple(lits))
        try:
            model = dpll(cnf, dpll_budget)
        except BudgetHit:
            return "unknown", None
        if model is None:
            return "unsat", None
        if function_free:
            return "sat", _herbrand_structure(consts, model, atom_ids)
    return "unknown", None


def _herbrand_structure(
    consts: list[str], model: dict[int, bool], atom_ids: dict[tuple, int]
) -> SigmaStructure:
    index = {("c", name): i for i, name in enumerate(consts)}
    preds: dict[str, set[tuple[int, ...]]] = {}
    for (pred, args), var in atom_ids.items():
        preds.setdefault(pred, set())
        if model.get(var, False):
            preds[pred].add(tuple(index[a] for a in args))
    return SigmaStructure(
        tuple(range(len(consts))),
        {name: index[("c", name)] for name in consts},
        {name: frozenset(tuples) for name, tuples in preds.items()},
        {},
    )
