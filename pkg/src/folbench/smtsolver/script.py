"""SMT-LIB2 script front end: declarations and assertion bodies.

Only the uninterpreted-sort fragment is understood; arithmetic, equality on
universe terms, let bindings, and multiple sorts are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

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
from .sexpr import parse_all


class UnsupportedScript(ValueError):
    pass


@dataclass
class Problem:
    constants: set[str] = field(default_factory=set)
    functions: dict[str, int] = field(default_factory=dict)
    predicates: dict[str, int] = field(default_factory=dict)
    assertions: list[Formula] = field(default_factory=list)


def parse_script(text: str) -> Problem:
    problem = Problem()
    for form in parse_all(text):
        if not isinstance(form, list) or not form:
            raise UnsupportedScript(f"stray token {form!r}")
        head = form[0]
        if head in ("set-logic", "set-option", "set-info", "get-model", "exit", "declare-sort"):
            continue
        if head == "declare-fun":
            _declare(problem, form)
        elif head == "declare-const":
            name, sort = form[1], form[2]
            _declare(problem, ["declare-fun", name, [], sort])
        elif head == "assert":
            if len(form) != 2:
                raise UnsupportedScript("assert takes exactly one body")
            problem.assertions.append(_formula(problem, form[1], {}))
        elif head == "check-sat":
            break
        else:
            raise UnsupportedScript(f"unsupported command {head!r}")
    return problem


def _declare(problem: Problem, form: list) -> None:
    if len(form) != 4 or not isinstance(form[2], list):
        raise UnsupportedScript(f"malformed declaration {form!r}")
    name, params, ret = form[1], form[2], form[3]
    if any(p != "U" for p in params):
        raise UnsupportedScript(f"declaration {name!r} uses a sort other than U")
    if ret == "Bool":
        problem.predicates[name] = len(params)
    elif ret == "U":
        if params:
            problem.functions[name] = len(params)
        else:
            problem.constants.add(name)
    else:
        raise UnsupportedScript(f"declaration {name!r} returns unsupported sort {ret!r}")


def _formula(problem: Problem, form, bound: dict[str, None]) -> Formula:
    if isinstance(form, str):
        if form == "true":
            # encode as a tautology over a throwaway nullary predicate
            raise UnsupportedScript("bare true/false literals are not supported")
        if form in problem.predicates:
            if problem.predicates[form] != 0:
                raise UnsupportedScript(f"predicate {form!r} used without arguments")
            return Atom(form)
        raise UnsupportedScript(f"unknown formula symbol {form!r}")
    if not form:
        raise UnsupportedScript("empty form")
    head = form[0]
    rest = form[1:]
    if head == "not":
        return Not(_formula(problem, rest[0], bound))
    if head in ("and", "or"):
        if len(rest) < 2:
            raise UnsupportedScript(f"{head} needs at least two operands")
        ctor = And if head == "and" else Or
        out = _formula(problem, rest[0], bound)
        for sub in rest[1:]:
            out = ctor(out, _formula(problem, sub, bound))
        return out
    if head == "=>":
        out = _formula(problem, rest[-1], bound)
        for sub in reversed(rest[:-1]):
            out = Implies(_formula(problem, sub, bound), out)
        return out
    if head == "=":
        if len(rest) != 2:
            raise UnsupportedScript("only binary = is supported")
        if _is_term(problem, rest[0], bound) or _is_term(problem, rest[1], bound):
            raise UnsupportedScript("equality over universe terms is not supported")
        return Iff(_formula(problem, rest[0], bound), _formula(problem, rest[1], bound))
    if head in ("forall", "exists"):
        binders, body = rest[0], rest[1]
        inner = dict(bound)
        names = []
        for binder in binders:
            if not isinstance(binder, list) or len(binder) != 2 or binder[1] != "U":
                raise UnsupportedScript(f"malformed binder {binder!r}")
            inner[binder[0]] = None
            names.append(binder[0])
        out = _formula(problem, body, inner)
        ctor = Forall if head == "forall" else Exists
        for name in reversed(names):
            out = ctor(name, out)
        return out
    if head in problem.predicates:
        if problem.predicates[head] != len(rest):
            raise UnsupportedScript(f"predicate {head!r} arity mismatch")
        return Atom(head, tuple(_term(problem, a, bound) for a in rest))
    raise UnsupportedScript(f"unsupported operator {head!r}")


def _is_term(problem: Problem, form, bound: dict[str, None]) -> bool:
    if isinstance(form, str):
        return form in bound or form in problem.constants
    return bool(form) and form[0] in problem.functions


def _term(problem: Problem, form, bound: dict[str, None]) -> Term:
    if isinstance(form, str):
        if form in bound:
            return Variable(form)
        if form in problem.constants:
            return Constant(form)
        raise UnsupportedScript(f"unknown term symbol {form!r}")
    head = form[0]
    if head not in problem.functions:
        raise UnsupportedScript(f"unknown function {head!r}")
    if problem.functions[head] != len(form) - 1:
        raise UnsupportedScript(f"function {head!r} arity mismatch")
    return FunctionApp(head, tuple(_term(problem, a, bound) for a in form[1:]))
