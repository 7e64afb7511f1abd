"""Shared test corpus: a fixed ontology and a seeded random formula generator.

The generator produces closed formulas with at most 6 connectives, 2
quantifiers, 4 predicates of arity <= 2, and no variable shadowing; the
acceptance suite freezes its corpora by seed.
"""

from __future__ import annotations

import random

from folbench.ontology import (
    Glossary,
    Instance,
    Ontology,
    PredicateGloss,
    Signature,
)
from folbench.syntax import (
    And,
    Atom,
    Constant,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Variable,
)

CORPUS_SIGNATURE = Signature(
    {"Red": 1, "Big": 1, "Near": 2, "Above": 2},
    frozenset({"a", "b"}),
)

CORPUS_GLOSSARY = Glossary(
    {
        "Red": PredicateGloss("x1 is red", "x1 is not red"),
        "Big": PredicateGloss("x1 is big", "x1 is not big"),
        "Near": PredicateGloss("x1 is near x2", "x1 is not near x2"),
        "Above": PredicateGloss("x1 is above x2", "x1 is not above x2"),
    },
    {"a": "the block a", "b": "the block b"},
)

CORPUS_ONTOLOGY = Ontology(CORPUS_SIGNATURE, CORPUS_GLOSSARY)

_VAR_POOL = ("x", "y")


def random_formula(
    rng: random.Random,
    max_connectives: int = 6,
    max_quantifiers: int = 2,
) -> Formula:
    """One random closed formula within the corpus limits."""
    budget = {
        "conn": rng.randint(1, max_connectives),
        "quant": rng.randint(0, max_quantifiers),
    }

    def atom(bound: tuple[str, ...]) -> Formula:
        name = rng.choice(list(CORPUS_SIGNATURE.predicates))
        arity = CORPUS_SIGNATURE.predicates[name]
        pool = [Variable(v) for v in bound] + [Constant(c) for c in sorted(CORPUS_SIGNATURE.constants)]
        return Atom(name, tuple(rng.choice(pool) for _ in range(arity)))

    def build(bound: tuple[str, ...]) -> Formula:
        choices = ["atom"]
        if budget["conn"] > 0:
            choices += ["not", "binary", "binary", "binary"]
        if budget["quant"] > 0 and len(bound) < len(_VAR_POOL):
            choices += ["quant", "quant"]
        kind = rng.choice(choices)
        if kind == "atom":
            return atom(bound)
        if kind == "not":
            budget["conn"] -= 1
            return Not(build(bound))
        if kind == "quant":
            budget["quant"] -= 1
            var = _VAR_POOL[len(bound)]  # fresh by construction: no shadowing
            ctor = rng.choice((Forall, Exists))
            return ctor(var, build(bound + (var,)))
        budget["conn"] -= 1
        ctor = rng.choice((And, Or, Implies, Iff))
        return ctor(build(bound), build(bound))

    return build(())


def corpus(n: int, seed: int) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng) for _ in range(n)]


def make_instances(n: int, seed: int, *, unique: bool = True) -> list[Instance]:
    """Instances whose utterance is the canonical formula string itself."""
    from folbench.syntax import print_formula

    rng = random.Random(seed)
    out: list[Instance] = []
    seen: set[str] = set()
    while len(out) < n:
        f = random_formula(rng)
        text = print_formula(f)
        if unique and text in seen:
            continue
        seen.add(text)
        out.append(Instance(f"inst{len(out):03d}", text, f, CORPUS_ONTOLOGY))
    return out
