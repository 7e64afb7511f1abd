"""Given-clause binary resolution with factoring.

Clauses are kept canonically renamed, so duplicate detection works modulo
variable names and a genuinely saturated search (no discards, budget not
exhausted) certifies satisfiability.  Deep resolvents past the term-depth cap
are discarded; that only weakens "sat"/"unsat" into "unknown", never flips an
answer.
"""

from __future__ import annotations

import heapq
from itertools import count

from .clausify import Clause, Literal, TermT

Subst = dict


def _walk(t: TermT, s: Subst) -> TermT:
    while t[0] == "v" and t in s:
        t = s[t]
    return t


def _occurs(v: TermT, t: TermT, s: Subst) -> bool:
    t = _walk(t, s)
    if t == v:
        return True
    if t[0] == "f":
        return any(_occurs(v, a, s) for a in t[2])
    return False


def unify(a: TermT, b: TermT, s: Subst | None) -> Subst | None:
    if s is None:
        return None
    a, b = _walk(a, s), _walk(b, s)
    if a == b:
        return s
    if a[0] == "v":
        if _occurs(a, b, s):
            return None
        s2 = dict(s)
        s2[a] = b
        return s2
    if b[0] == "v":
        return unify(b, a, s)
    if a[0] == "f" and b[0] == "f" and a[1] == b[1] and len(a[2]) == len(b[2]):
        for x, y in zip(a[2], b[2]):
            s = unify(x, y, s)
            if s is None:
                return None
        return s
    return None


def unify_tuples(xs: tuple, ys: tuple, s: Subst | None = None) -> Subst | None:
    s = {} if s is None else s
    if len(xs) != len(ys):
        return None
    for x, y in zip(xs, ys):
        s = unify(x, y, s)
        if s is None:
            return None
    return s


def apply_subst(t: TermT, s: Subst) -> TermT:
    t = _walk(t, s)
    if t[0] == "f":
        return ("f", t[1], tuple(apply_subst(a, s) for a in t[2]))
    return t


def _apply_clause(clause: frozenset, s: Subst) -> frozenset:
    return frozenset(
        (sign, pred, tuple(apply_subst(a, s) for a in args)) for sign, pred, args in clause
    )


def _canonical(clause: frozenset) -> frozenset:
    """Rename variables to v0, v1, ... in a deterministic literal order."""
    mapping: dict[str, TermT] = {}

    def canon_term(t: TermT) -> TermT:
        if t[0] == "v":
            if t[1] not in mapping:
                mapping[t[1]] = ("v", f"v{len(mapping)}")
            return mapping[t[1]]
        if t[0] == "f":
            return ("f", t[1], tuple(canon_term(a) for a in t[2]))
        return t

    out = []
    for lit in sorted(clause, key=repr):
        sign, pred, args = lit
        out.append((sign, pred, tuple(canon_term(a) for a in args)))
    return frozenset(out)


def _rename_apart(clause: frozenset, tag: str) -> frozenset:
    def ren(t: TermT) -> TermT:
        if t[0] == "v":
            return ("v", t[1] + tag)
        if t[0] == "f":
            return ("f", t[1], tuple(ren(a) for a in t[2]))
        return t

    return frozenset((sign, pred, tuple(ren(a) for a in args)) for sign, pred, args in clause)


def _term_depth(t: TermT) -> int:
    if t[0] != "f":
        return 1
    return 1 + max((_term_depth(a) for a in t[2]), default=0)


def _clause_depth(clause: frozenset) -> int:
    return max((_term_depth(a) for _, _, args in clause for a in args), default=0)


def _is_tautology(clause: frozenset) -> bool:
    return any((not sign, pred, args) in clause for sign, pred, args in clause)


def _resolvents(given: frozenset, other: frozenset):
    other = _rename_apart(other, "o")
    for lit1 in given:
        sign1, pred1, args1 = lit1
        for lit2 in other:
            sign2, pred2, args2 = lit2
            if pred1 != pred2 or sign1 == sign2:
                continue
            s = unify_tuples(args1, args2)
            if s is None:
                continue
            yield _apply_clause((given - {lit1}) | (other - {lit2}), s)


def _factors(clause: frozenset):
    lits = sorted(clause, key=repr)
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            s1, p1, a1 = lits[i]
            s2, p2, a2 = lits[j]
            if s1 != s2 or p1 != p2:
                continue
            s = unify_tuples(a1, a2)
            if s is not None:
                yield _apply_clause(clause, s)


def refute(clauses: list[Clause], max_generated: int = 20_000, max_depth: int = 12) -> str:
    """Saturate the clause set; returns "unsat", "sat", or "unknown"."""
    seen: set[frozenset] = set()
    passive: list[tuple[int, int, frozenset]] = []
    ticket = count()
    discarded = False
    generated = 0

    def push(clause: frozenset) -> bool:
        """Queue a canonical clause; True signals the empty clause."""
        nonlocal discarded
        if _is_tautology(clause):
            return False
        canon = _canonical(clause)
        if canon in seen:
            return False
        if _clause_depth(canon) > max_depth:
            discarded = True
            return False
        seen.add(canon)
        if not canon:
            return True
        heapq.heappush(passive, (len(canon), next(ticket), canon))
        return False

    for clause in clauses:
        if push(clause):
            return "unsat"

    active: list[frozenset] = []
    while passive:
        _, _, given = heapq.heappop(passive)
        active.append(given)
        partners = list(active)
        for other in partners:
            for resolvent in _resolvents(given, other):
                generated += 1
                if push(resolvent):
                    return "unsat"
                if generated >= max_generated:
                    return "unknown"
        for factor in _factors(given):
            generated += 1
            if push(factor):
                return "unsat"
            if generated >= max_generated:
                return "unknown"
    return "unknown" if discarded else "sat"
