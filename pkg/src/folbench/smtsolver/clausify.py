"""Clause-form conversion: negation pushing, Skolemization, CNF.

Terms inside clauses use a compact tuple encoding:

    ('v', name)         variable
    ('c', name)         constant
    ('f', name, args)   function application

A literal is (sign, predicate, args) and a clause a frozenset of literals.
The negation pushing here is intentionally written independently of
folbench.syntax.to_nnf, so that solver verdicts about that transformation do
not rely on the transformation itself.
"""

from __future__ import annotations

from itertools import count
from typing import Iterator

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

TermT = tuple
Literal = tuple  # (sign: bool, pred: str, args: tuple[TermT, ...])
Clause = frozenset


class ClauseBlowup(ValueError):
    pass


def _rename_term(t: Term, rename: dict[str, str]) -> Term:
    if isinstance(t, Variable):
        return Variable(rename[t.name])
    if isinstance(t, Constant):
        return t
    return FunctionApp(t.name, tuple(_rename_term(a, rename) for a in t.args))


def _push(f: Formula, positive: bool, rename: dict[str, str], fresh: Iterator[int]):
    """Negation normal form with binders renamed apart.

    Returns a tree of ('lit', sign, pred, args) / ('and'|'or', l, r) /
    ('forall'|'exists', var, body) nodes.
    """
    if isinstance(f, Atom):
        return ("lit", positive, f.predicate, tuple(_rename_term(a, rename) for a in f.args))
    if isinstance(f, Not):
        return _push(f.operand, not positive, rename, fresh)
    if isinstance(f, And):
        op = "and" if positive else "or"
        return (op, _push(f.left, positive, rename, fresh), _push(f.right, positive, rename, fresh))
    if isinstance(f, Or):
        op = "or" if positive else "and"
        return (op, _push(f.left, positive, rename, fresh), _push(f.right, positive, rename, fresh))
    if isinstance(f, Implies):
        if positive:
            return ("or", _push(f.left, False, rename, fresh), _push(f.right, True, rename, fresh))
        return ("and", _push(f.left, True, rename, fresh), _push(f.right, False, rename, fresh))
    if isinstance(f, Iff):
        if positive:
            return (
                "and",
                ("or", _push(f.left, False, rename, fresh), _push(f.right, True, rename, fresh)),
                ("or", _push(f.right, False, rename, fresh), _push(f.left, True, rename, fresh)),
            )
        return (
            "or",
            ("and", _push(f.left, True, rename, fresh), _push(f.right, False, rename, fresh)),
            ("and", _push(f.right, True, rename, fresh), _push(f.left, False, rename, fresh)),
        )
    if isinstance(f, Forall):
        kind = "forall" if positive else "exists"
    else:
        kind = "exists" if positive else "forall"
    new_name = f"V{next(fresh)}"
    inner = dict(rename)
    inner[f.var] = new_name
    return (kind, new_name, _push(f.body, positive, inner, fresh))


def _skolem_term(t: Term, subst: dict[str, TermT]) -> TermT:
    if isinstance(t, Variable):
        return subst.get(t.name, ("v", t.name))
    if isinstance(t, Constant):
        return ("c", t.name)
    return ("f", t.name, tuple(_skolem_term(a, subst) for a in t.args))


def _skolemize(node, universals: tuple[str, ...], subst: dict[str, TermT], fresh: Iterator[int]):
    kind = node[0]
    if kind == "lit":
        _, sign, pred, args = node
        return ("lit", sign, pred, tuple(_skolem_term(a, subst) for a in args))
    if kind in ("and", "or"):
        return (
            kind,
            _skolemize(node[1], universals, subst, fresh),
            _skolemize(node[2], universals, subst, fresh),
        )
    if kind == "forall":
        return _skolemize(node[2], universals + (node[1],), subst, fresh)
    # exists: replace the bound variable with a Skolem term over the
    # universals in scope
    name = f"_sk{next(fresh)}"
    term: TermT = ("f", name, tuple(("v", u) for u in universals)) if universals else ("c", name)
    inner = dict(subst)
    inner[node[1]] = term
    return _skolemize(node[2], universals, inner, fresh)


def _cnf(node, max_clauses: int) -> list[set]:
    kind = node[0]
    if kind == "lit":
        return [{(node[1], node[2], node[3])}]
    left = _cnf(node[1], max_clauses)
    right = _cnf(node[2], max_clauses)
    if kind == "and":
        out = left + right
    else:
        out = [a | b for a in left for b in right]
    if len(out) > max_clauses:
        raise ClauseBlowup(f"CNF exceeds {max_clauses} clauses")
    return out


def _is_tautology(clause: set) -> bool:
    return any((not sign, pred, args) in clause for sign, pred, args in clause)


def clausify(assertions: list[Formula], max_clauses: int = 4096) -> list[Clause]:
    """Skolemized clause set equisatisfiable with the assertions."""
    fresh_vars = count()
    fresh_sk = count()
    clauses: list[Clause] = []
    for f in assertions:
        tree = _push(f, True, {}, fresh_vars)
        tree = _skolemize(tree, (), {}, fresh_sk)
        for clause in _cnf(tree, max_clauses):
            if not _is_tautology(clause):
                clauses.append(frozenset(clause))
    return clauses


def collect_symbols(clauses: list[Clause]) -> tuple[set[str], dict[str, int], dict[str, int]]:
    """Constants, functions, and predicates occurring in the clause set."""
    consts: set[str] = set()
    funcs: dict[str, int] = {}
    preds: dict[str, int] = {}

    def walk(t: TermT) -> None:
        if t[0] == "c":
            consts.add(t[1])
        elif t[0] == "f":
            funcs[t[1]] = len(t[2])
            for a in t[2]:
                walk(a)

    for clause in clauses:
        for _, pred, args in clause:
            preds[pred] = len(args)
            for a in args:
                walk(a)
    return consts, funcs, preds
