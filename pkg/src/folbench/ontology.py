"""Signatures, glossaries, ontologies, and dataset instances.

A signature declares the predicate, constant, and function vocabulary with
fixed arities; the three name sets must be pairwise disjoint.  A glossary
attaches a positive and a negative English template to every predicate and a
meaning to every constant; an ontology pairs the two and requires them to
cover exactly the same symbols.

File format (JSON):

    {
      "predicates": {"Cube": {"arity": 1,
                              "positive": "x1 is a cube",
                              "negative": "x1 is not a cube"}},
      "constants":  {"A": "the object A"},
      "functions":  {}
    }
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .syntax import (
    Atom,
    Constant,
    FolbenchError,
    Formula,
    FunctionApp,
    QUANTIFIER_TYPES,
    Term,
    Variable,
    free_vars,
    subformulas,
)


class UnknownSymbol(FolbenchError):
    def __init__(self, symbol: str, detail: str = ""):
        self.symbol = symbol
        super().__init__(f"unknown symbol {symbol!r}" + (f": {detail}" if detail else ""))


class ArityMismatch(FolbenchError):
    def __init__(self, symbol: str, expected: int, got: int):
        self.symbol = symbol
        self.expected = expected
        self.got = got
        super().__init__(f"symbol {symbol!r} declared with arity {expected}, used with {got}")


class MissingGloss(FolbenchError):
    def __init__(self, symbol: str):
        self.symbol = symbol
        super().__init__(f"no glossary entry for symbol {symbol!r}")


@dataclass(frozen=True)
class Signature:
    """Declared vocabulary: predicate and function arities plus constants."""

    predicates: Mapping[str, int] = field(default_factory=dict)
    constants: frozenset[str] = frozenset()
    functions: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "predicates", dict(self.predicates))
        object.__setattr__(self, "constants", frozenset(self.constants))
        object.__setattr__(self, "functions", dict(self.functions))
        names = [*self.predicates, *self.constants, *self.functions]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"predicate/constant/function namespaces overlap: {dupes}")
        for name, arity in self.predicates.items():
            if arity < 0:
                raise ValueError(f"predicate {name!r} has negative arity")
        for name, arity in self.functions.items():
            if arity < 1:
                raise ValueError(f"function {name!r} must have positive arity")

    @property
    def all_names(self) -> frozenset[str]:
        return frozenset(self.predicates) | self.constants | frozenset(self.functions)

    def merge(self, other: "Signature") -> "Signature":
        """Union of two signatures; conflicting arities are rejected."""
        preds = dict(self.predicates)
        for name, arity in other.predicates.items():
            if preds.get(name, arity) != arity:
                raise ArityMismatch(name, preds[name], arity)
            preds[name] = arity
        funcs = dict(self.functions)
        for name, arity in other.functions.items():
            if funcs.get(name, arity) != arity:
                raise ArityMismatch(name, funcs[name], arity)
            funcs[name] = arity
        return Signature(preds, self.constants | other.constants, funcs)


def validate_formula(f: Formula, sig: Signature) -> None:
    """Check that every symbol in f is declared and used at its arity.

    Variables are the identifiers not declared in the signature; a quantified
    variable whose name collides with a declared symbol violates namespace
    disjointness and is rejected.
    """

    def check_term(t: Term) -> None:
        if isinstance(t, Variable):
            if t.name in sig.all_names:
                raise ValueError(f"variable {t.name!r} collides with a declared symbol")
        elif isinstance(t, Constant):
            if t.name not in sig.constants:
                raise UnknownSymbol(t.name, "not a declared constant")
        else:
            if t.name not in sig.functions:
                raise UnknownSymbol(t.name, "not a declared function")
            if sig.functions[t.name] != len(t.args):
                raise ArityMismatch(t.name, sig.functions[t.name], len(t.args))
            for a in t.args:
                check_term(a)

    for _, node in subformulas(f):
        if isinstance(node, Atom):
            if node.predicate not in sig.predicates:
                raise UnknownSymbol(node.predicate, "not a declared predicate")
            if sig.predicates[node.predicate] != len(node.args):
                raise ArityMismatch(node.predicate, sig.predicates[node.predicate], len(node.args))
            for a in node.args:
                check_term(a)
        elif isinstance(node, QUANTIFIER_TYPES):
            if node.var in sig.all_names:
                raise ValueError(f"variable {node.var!r} collides with a declared symbol")


def infer_signature(f: Formula) -> Signature:
    """Signature induced by the symbols actually occurring in f."""
    preds: dict[str, int] = {}
    consts: set[str] = set()
    funcs: dict[str, int] = {}

    def walk_term(t: Term) -> None:
        if isinstance(t, Constant):
            consts.add(t.name)
        elif isinstance(t, FunctionApp):
            funcs[t.name] = len(t.args)
            for a in t.args:
                walk_term(a)

    for _, node in subformulas(f):
        if isinstance(node, Atom):
            preds[node.predicate] = len(node.args)
            for a in node.args:
                walk_term(a)
    return Signature(preds, frozenset(consts), funcs)


_PLACEHOLDER_RE = re.compile(r"\bx([0-9]+)\b")


@dataclass(frozen=True)
class PredicateGloss:
    positive: str
    negative: str


@dataclass(frozen=True)
class Glossary:
    """English meanings: templates with x1..xn placeholders per predicate."""

    predicate_meanings: Mapping[str, PredicateGloss] = field(default_factory=dict)
    constant_meanings: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "predicate_meanings", dict(self.predicate_meanings))
        object.__setattr__(self, "constant_meanings", dict(self.constant_meanings))


@dataclass(frozen=True)
class Ontology:
    signature: Signature
    glossary: Glossary

    def __post_init__(self) -> None:
        sig, glo = self.signature, self.glossary
        for name, arity in sig.predicates.items():
            gloss = glo.predicate_meanings.get(name)
            if gloss is None:
                raise MissingGloss(name)
            for template in (gloss.positive, gloss.negative):
                for m in _PLACEHOLDER_RE.finditer(template):
                    idx = int(m.group(1))
                    if not 1 <= idx <= arity:
                        raise ValueError(
                            f"template for {name!r} uses placeholder x{idx}, arity is {arity}"
                        )
        for name in sig.constants:
            if name not in glo.constant_meanings:
                raise MissingGloss(name)
        extra_p = set(glo.predicate_meanings) - set(sig.predicates)
        extra_c = set(glo.constant_meanings) - sig.constants
        if extra_p or extra_c:
            raise ValueError(
                f"glossary entries without declaration: {sorted(extra_p | extra_c)}"
            )


@dataclass(frozen=True)
class Instance:
    """One dataset triple: utterance, its gold formula, and the ontology."""

    id: str
    utterance: str
    formula: Formula
    ontology: Ontology

    def __post_init__(self) -> None:
        validate_formula(self.formula, self.ontology.signature)
        leftover = free_vars(self.formula)
        if leftover:
            raise ValueError(f"instance {self.id!r} formula has free variables {sorted(leftover)}")


# ---------------------------------------------------------------------------
# Ontology file format
# ---------------------------------------------------------------------------


def ontology_to_dict(o: Ontology) -> dict:
    return {
        "predicates": {
            name: {
                "arity": arity,
                "positive": o.glossary.predicate_meanings[name].positive,
                "negative": o.glossary.predicate_meanings[name].negative,
            }
            for name, arity in sorted(o.signature.predicates.items())
        },
        "constants": {
            name: o.glossary.constant_meanings[name] for name in sorted(o.signature.constants)
        },
        "functions": dict(sorted(o.signature.functions.items())),
    }


def ontology_from_dict(d: dict) -> Ontology:
    preds = {}
    meanings = {}
    for name, spec in d.get("predicates", {}).items():
        preds[name] = int(spec["arity"])
        meanings[name] = PredicateGloss(spec["positive"], spec["negative"])
    constants = d.get("constants", {})
    sig = Signature(preds, frozenset(constants), dict(d.get("functions", {})))
    glossary = Glossary(meanings, dict(constants))
    return Ontology(sig, glossary)


def load_ontology(path: str | Path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        return ontology_from_dict(json.load(fh))


def save_ontology(o: Ontology, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(ontology_to_dict(o), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
