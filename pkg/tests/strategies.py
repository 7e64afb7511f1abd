"""Hypothesis strategies for formulas over the shared corpus signature."""

from __future__ import annotations

import hypothesis.strategies as st

from folbench.syntax import (
    And,
    Atom,
    Constant,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    QUANTIFIER_TYPES,
    Variable,
    subformulas,
)

from gen import CORPUS_SIGNATURE

_VARS = ("x", "y", "z")
_CONSTS = tuple(sorted(CORPUS_SIGNATURE.constants))


def terms():
    return st.one_of(
        st.sampled_from(_VARS).map(Variable),
        st.sampled_from(_CONSTS).map(Constant),
    )


def atoms():
    return st.sampled_from(sorted(CORPUS_SIGNATURE.predicates)).flatmap(
        lambda name: st.tuples(
            *[terms()] * CORPUS_SIGNATURE.predicates[name]
        ).map(lambda args: Atom(name, args))
    )


def _has_shadowing(f) -> bool:
    def walk(node, bound):
        if isinstance(node, QUANTIFIER_TYPES):
            if node.var in bound:
                return True
            return walk(node.body, bound | {node.var})
        from folbench.syntax import children

        return any(walk(child, bound) for child in children(node))

    return walk(f, frozenset())


def formulas(max_leaves: int = 8):
    """Possibly-open formulas without variable shadowing."""
    base = atoms()
    strategy = st.recursive(
        base,
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda p: And(*p)),
            st.tuples(sub, sub).map(lambda p: Or(*p)),
            st.tuples(sub, sub).map(lambda p: Implies(*p)),
            st.tuples(sub, sub).map(lambda p: Iff(*p)),
            st.tuples(st.sampled_from(_VARS), sub).map(lambda p: Forall(*p)),
            st.tuples(st.sampled_from(_VARS), sub).map(lambda p: Exists(*p)),
        ),
        max_leaves=max_leaves,
    )
    return strategy.filter(lambda f: not _has_shadowing(f))


def closed_formulas(max_leaves: int = 8):
    from folbench.syntax import close

    return formulas(max_leaves).map(close).filter(lambda f: not _has_shadowing(f))
