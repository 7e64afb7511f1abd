import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from folbench.ontology import Glossary, Instance, Ontology, PredicateGloss, Signature
from folbench.parser import parse_formula


@pytest.fixture(scope="session")
def country_pair():
    """The worked truth-table example: gold formula and a merged-predicate
    candidate over a joint signature."""
    sig = Signature({"Country": 1, "InEU": 1, "EUCountry": 1, "CountryInEU": 1})
    gold = parse_formula("∀x Country(x) ∧ InEU(x) → EUCountry(x)", sig)
    candidate = parse_formula("∀y CountryInEU(y) → EUCountry(y)", sig)
    return gold, candidate, sig


@pytest.fixture(scope="session")
def turtle_ontology():
    sig = Signature({"Turtle": 1, "Shell": 1, "CanSwim": 1})
    glossary = Glossary(
        {
            "Turtle": PredicateGloss("x1 is a turtle", "x1 is not a turtle"),
            "Shell": PredicateGloss("x1 has a shell", "x1 doesn't have a shell"),
            "CanSwim": PredicateGloss("x1 can swim", "x1 cannot swim"),
        },
        {},
    )
    return Ontology(sig, glossary)
