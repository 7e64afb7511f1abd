"""MACE-style finite-model search: ground, Tseitin-encode, run DPLL.

For a candidate domain size the quantifiers of every assertion are expanded
over the domain, constant and function interpretations are enumerated
outside the SAT problem (they are few and small in this fragment), and the
remaining propositional structure goes to DPLL.
"""

from __future__ import annotations

from itertools import product

from ..equiv import SigmaStructure
from ..syntax import (
    And,
    Atom,
    Constant,
    Exists,
    Forall,
    Formula,
    FunctionApp,
    Iff,
    Implies,
    Not,
    Or,
    Term,
    Variable,
)
from .sat import BudgetHit, Tseitin, dpll
from .script import Problem


def _ground_term(t: Term, env: dict[str, int], consts: dict[str, int], funcs) -> int:
    if isinstance(t, Variable):
        return env[t.name]
    if isinstance(t, Constant):
        return consts[t.name]
    args = tuple(_ground_term(a, env, consts, funcs) for a in t.args)
    return funcs[t.name][args]


def _ground(f: Formula, env: dict[str, int], domain: range, consts, funcs):
    """Propositional tree over ('var', atom-key) leaves, as nested tuples."""
    if isinstance(f, Atom):
        key = (f.predicate, tuple(_ground_term(a, env, consts, funcs) for a in f.args))
        return ("var", key)
    if isinstance(f, Not):
        return ("not", _ground(f.operand, env, domain, consts, funcs))
    if isinstance(f, And):
        return ("and", (_ground(f.left, env, domain, consts, funcs),
                        _ground(f.right, env, domain, consts, funcs)))
    if isinstance(f, Or):
        return ("or", (_ground(f.left, env, domain, consts, funcs),
                       _ground(f.right, env, domain, consts, funcs)))
    if isinstance(f, Implies):
        return ("or", (("not", _ground(f.left, env, domain, consts, funcs)),
                       _ground(f.right, env, domain, consts, funcs)))
    if isinstance(f, Iff):
        a = _ground(f.left, env, domain, consts, funcs)
        b = _ground(f.right, env, domain, consts, funcs)
        return ("or", (("and", (a, b)), ("and", (("not", a), ("not", b)))))
    if isinstance(f, Forall):
        parts = tuple(
            _ground(f.body, {**env, f.var: d}, domain, consts, funcs) for d in domain
        )
        return parts[0] if len(parts) == 1 else ("and", parts)
    parts = tuple(_ground(f.body, {**env, f.var: d}, domain, consts, funcs) for d in domain)
    return parts[0] if len(parts) == 1 else ("or", parts)


def _function_tables(funcs: dict[str, int], d: int):
    """Every total interpretation of every function symbol, as one product."""
    names = sorted(funcs)
    spaces = []
    for name in names:
        points = list(product(range(d), repeat=funcs[name]))
        spaces.append(
            [dict(zip(points, values)) for values in product(range(d), repeat=len(points))]
        )
    for combo in product(*spaces) if names else [()]:
        yield dict(zip(names, combo))


def search_size(problem: Problem, d: int, dpll_budget: int) -> tuple[SigmaStructure | None, bool]:
    """Look for a model with |domain| == d; returns (model, search_complete)."""
    domain = range(d)
    complete = True
    const_names = sorted(problem.constants)
    for const_values in product(range(d), repeat=len(const_names)):
        consts = dict(zip(const_names, const_values))
        for funcs in _function_tables(problem.functions, d):
            enc = Tseitin()
            roots = [enc.encode(_ground(f, {}, domain, consts, funcs)) for f in problem.assertions]
            clauses = enc.clauses + [(r,) for r in roots]
            try:
                model = dpll(clauses, dpll_budget)
            except BudgetHit:
                complete = False
                continue
            if model is None:
                continue
            preds = {
                name: frozenset(
                    key[1]
                    for key, var in enc.atom_var.items()
                    if key[0] == name and model.get(var, False)
                )
                for name in problem.predicates
            }
            return SigmaStructure(tuple(domain), consts, preds, funcs), complete
    return None, complete
