"""First-order logic abstract syntax and structural operations.

Terms and formulas are small frozen dataclasses, so structural equality and
hashing come for free and every value can be shared across threads.  Binary
connectives are strictly binary; n-ary surface syntax is resolved by the
parser.  All functions in this module are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union


class FolbenchError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class FunctionApp:
    name: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Variable, Constant, FunctionApp]


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Iff, Forall, Exists]

BINARY_TYPES = (And, Or, Implies, Iff)
QUANTIFIER_TYPES = (Forall, Exists)


# ---------------------------------------------------------------------------
# Tree plumbing
# ---------------------------------------------------------------------------


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, Not):
        return (f.operand,)
    if isinstance(f, BINARY_TYPES):
        return (f.left, f.right)
    return (f.body,)


def with_children(f: Formula, new: Sequence[Formula]) -> Formula:
    if isinstance(f, Atom):
        if new:
            raise ValueError("atoms have no subformulas")
        return f
    if isinstance(f, Not):
        return Not(new[0])
    if isinstance(f, BINARY_TYPES):
        return type(f)(new[0], new[1])
    return type(f)(f.var, new[0])


def subformulas(f: Formula) -> Iterator[tuple[tuple[int, ...], Formula]]:
    """Yield every (path, node) pair in preorder; the root path is ()."""
    stack: list[tuple[tuple[int, ...], Formula]] = [((), f)]
    while stack:
        path, node = stack.pop()
        yield path, node
        kids = children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((path + (i,), kids[i]))


def replace_at(f: Formula, path: tuple[int, ...], new: Formula) -> Formula:
    if not path:
        return new
    kids = list(children(f))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(f, kids)


def term_variables(t: Term) -> frozenset[str]:
    if isinstance(t, Variable):
        return frozenset((t.name,))
    if isinstance(t, Constant):
        return frozenset()
    out: frozenset[str] = frozenset()
    for a in t.args:
        out |= term_variables(a)
    return out


def free_vars(f: Formula) -> frozenset[str]:
    """Standard free-variable set; empty exactly for closed formulas."""
    if isinstance(f, Atom):
        out: frozenset[str] = frozenset()
        for a in f.args:
            out |= term_variables(a)
        return out
    if isinstance(f, Not):
        return free_vars(f.operand)
    if isinstance(f, BINARY_TYPES):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def close(f: Formula) -> Formula:
    """Bind every free variable universally, outermost in sorted order."""
    for name in sorted(free_vars(f), reverse=True):
        f = Forall(name, f)
    return f


def is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.operand, Atom))


def negate(f: Formula) -> Formula:
    """The outright negation; no simplification, even of double negations."""
    return Not(f)


# ---------------------------------------------------------------------------
# Negation normal form
# ---------------------------------------------------------------------------


def to_nnf(f: Formula) -> Formula:
    """Equivalent formula in which negation occurs only directly above atoms.

    Implications expand as Not(a) | b and bi-implications as
    (Not(a) | b) & (Not(b) | a) before negations are pushed inward.
    The result is idempotent: to_nnf(to_nnf(f)) == to_nnf(f).
    """
    return _nnf_pos(f)


def _nnf_pos(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return _nnf_neg(f.operand)
    if isinstance(f, And):
        return And(_nnf_pos(f.left), _nnf_pos(f.right))
    if isinstance(f, Or):
        return Or(_nnf_pos(f.left), _nnf_pos(f.right))
    if isinstance(f, Implies):
        return Or(_nnf_neg(f.left), _nnf_pos(f.right))
    if isinstance(f, Iff):
        return And(
            Or(_nnf_neg(f.left), _nnf_pos(f.right)),
            Or(_nnf_neg(f.right), _nnf_pos(f.left)),
        )
    if isinstance(f, Forall):
        return Forall(f.var, _nnf_pos(f.body))
    return Exists(f.var, _nnf_pos(f.body))


def _nnf_neg(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return _nnf_pos(f.operand)
    if isinstance(f, And):
        return Or(_nnf_neg(f.left), _nnf_neg(f.right))
    if isinstance(f, Or):
        return And(_nnf_neg(f.left), _nnf_neg(f.right))
    if isinstance(f, Implies):
        return And(_nnf_pos(f.left), _nnf_neg(f.right))
    if isinstance(f, Iff):
        return Or(
            And(_nnf_pos(f.left), _nnf_neg(f.right)),
            And(_nnf_pos(f.right), _nnf_neg(f.left)),
        )
    if isinstance(f, Forall):
        return Exists(f.var, _nnf_neg(f.body))
    return Forall(f.var, _nnf_neg(f.body))


def is_nnf(f: Formula) -> bool:
    return all(
        isinstance(node.operand, Atom)
        for _, node in subformulas(f)
        if isinstance(node, Not)
    )


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_OP_SYMBOL = {And: "∧", Or: "∨", Implies: "→", Iff: "↔"}
_PRECEDENCE = {Iff: 1, Implies: 2, Or: 3, And: 4}
_RIGHT_ASSOC = (Implies, Iff)


def _prec(f: Formula) -> int:
    if isinstance(f, BINARY_TYPES):
        return _PRECEDENCE[type(f)]
    if isinstance(f, Atom):
        return 6
    return 5  # Not and quantifiers


def _right_open(f: Formula) -> bool:
    """Whether f's rightmost spine ends in a quantifier scope.

    Quantifiers take maximal scope, so such a formula would swallow any
    operator printed after it and must be parenthesized as a left operand.
    """
    if isinstance(f, QUANTIFIER_TYPES):
        return True
    if isinstance(f, Not):
        return _right_open(f.operand)
    if isinstance(f, BINARY_TYPES):
        return _right_open(f.right)
    return False


def _term_str(t: Term) -> str:
    if isinstance(t, (Variable, Constant)):
        return t.name
    return f"{t.name}({','.join(_term_str(a) for a in t.args)})"


def print_formula(f: Formula) -> str:
    """Canonical rendering with minimal parentheses; reparsing it under the
    same signature reproduces the input tree exactly."""
    if isinstance(f, Atom):
        if not f.args:
            return f.predicate
        return f"{f.predicate}({','.join(_term_str(a) for a in f.args)})"
    if isinstance(f, Not):
        inner = print_formula(f.operand)
        if _prec(f.operand) < 5:
            inner = f"({inner})"
        return "¬" + inner
    if isinstance(f, Forall):
        return f"∀{f.var} {print_formula(f.body)}"
    if isinstance(f, Exists):
        return f"∃{f.var} {print_formula(f.body)}"

    op_prec = _PRECEDENCE[type(f)]
    left = print_formula(f.left)
    right = print_formula(f.right)
    lp = _prec(f.left)
    rp = _prec(f.right)
    if lp < op_prec or (lp == op_prec and type(f) in _RIGHT_ASSOC) or _right_open(f.left):
        left = f"({left})"
    if rp < op_prec or (rp == op_prec and type(f) not in _RIGHT_ASSOC):
        right = f"({right})"
    return f"{left} {_OP_SYMBOL[type(f)]} {right}"
