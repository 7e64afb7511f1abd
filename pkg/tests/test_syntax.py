import pytest
from hypothesis import given, settings

import strategies
from gen import CORPUS_SIGNATURE, corpus

from folbench.parser import parse_formula
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
    Variable,
    close,
    free_vars,
    is_nnf,
    negate,
    print_formula,
    replace_at,
    subformulas,
    to_nnf,
)

x, y = Variable("x"), Variable("y")
a = Constant("a")


def P(*args):
    return Atom("Red", args)


def Q(*args):
    return Atom("Big", args)


class TestPrinting:
    def test_quantified_atom(self):
        assert print_formula(Forall("x", P(x))) == "∀x Red(x)"

    def test_conjunction(self):
        assert print_formula(And(P(x), Q(x))) == "Red(x) ∧ Big(x)"

    def test_implication_keeps_minimal_parens(self):
        f = Implies(And(P(x), Q(x)), P(y))
        assert print_formula(f) == "Red(x) ∧ Big(x) → Red(y)"
        assert parse_formula(print_formula(f), CORPUS_SIGNATURE) == f

    def test_left_operand_quantifier_is_parenthesized(self):
        f = And(Forall("x", P(x)), Q(a))
        text = print_formula(f)
        assert text == "(∀x Red(x)) ∧ Big(a)"
        assert parse_formula(text, CORPUS_SIGNATURE) == f

    def test_associativity_parens(self):
        assert print_formula(And(P(a), And(Q(a), P(a)))) == "Red(a) ∧ (Big(a) ∧ Red(a))"
        assert print_formula(And(And(P(a), Q(a)), P(a))) == "Red(a) ∧ Big(a) ∧ Red(a)"
        assert (
            print_formula(Implies(Implies(P(a), Q(a)), P(a)))
            == "(Red(a) → Big(a)) → Red(a)"
        )

    @settings(max_examples=300)
    @given(strategies.formulas())
    def test_round_trip(self, f):
        assert parse_formula(print_formula(f), CORPUS_SIGNATURE) == f

    def test_round_trip_on_seeded_corpus(self):
        for f in corpus(300, seed=7):
            assert parse_formula(print_formula(f), CORPUS_SIGNATURE) == f


class TestNnf:
    def test_de_morgan(self):
        f = Not(And(P(x), Q(x)))
        assert to_nnf(f) == Or(Not(P(x)), Not(Q(x)))

    def test_quantifier_duality(self):
        assert to_nnf(Not(Forall("x", P(x)))) == Exists("x", Not(P(x)))

    def test_negated_implication(self):
        f = Not(Implies(P(x), Q(x)))
        assert to_nnf(f) == And(P(x), Not(Q(x)))

    @given(strategies.formulas())
    def test_shape_and_idempotence(self, f):
        g = to_nnf(f)
        assert is_nnf(g)
        assert to_nnf(g) == g

    def test_iff_expansion(self):
        f = Iff(P(x), Q(x))
        assert to_nnf(f) == And(Or(Not(P(x)), Q(x)), Or(Not(Q(x)), P(x)))


class TestNegate:
    def test_plain_wrap(self):
        assert negate(P(a)) == Not(P(a))
        assert negate(Forall("x", P(x))) == Not(Forall("x", P(x)))

    def test_no_double_negation_collapse(self):
        assert negate(Not(P(a))) == Not(Not(P(a)))


class TestFreeVars:
    def test_partially_bound(self):
        f = Forall("x", Atom("Near", (x, y)))
        assert free_vars(f) == {"y"}

    def test_closed(self):
        f = Forall("x", Exists("y", Atom("Near", (x, y))))
        assert free_vars(f) == frozenset()

    def test_scoping(self):
        f = And(P(x), Exists("x", Q(x)))
        assert free_vars(f) == {"x"}

    @given(strategies.formulas())
    def test_close_leaves_nothing_free(self, f):
        assert free_vars(close(f)) == frozenset()


class TestTreePlumbing:
    def test_replace_at_path(self):
        f = And(P(a), Or(Q(a), P(x)))
        g = replace_at(f, (1, 0), Not(Q(a)))
        assert g == And(P(a), Or(Not(Q(a)), P(x)))

    def test_subformulas_preorder(self):
        f = And(P(a), Q(a))
        nodes = list(subformulas(f))
        assert nodes[0] == ((), f)
        assert ((0,), P(a)) in nodes and ((1,), Q(a)) in nodes
