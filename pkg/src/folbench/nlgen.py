"""Mechanical rendering of formulas into English via a glossary.

The translation is deliberately template-driven: atoms use the predicate's
positive template, negated atoms its negative template, and each connective
has a fixed phrase.  Variables are rendered verbatim, constants through their
glossary meaning.  The default mode carries no grouping marks, which can make
distinct formulas render identically; parenthesized=True keeps explicit
parentheses around every compound part and is unambiguous.

Fixed phrases:

    a and b | a or b | if a, then b | a if and only if b
    it's false that a        (negation of a non-atomic formula)
    there is x such that a   (existential)
    for all x a              (universal)
"""

from __future__ import annotations

import re

from .ontology import Glossary, MissingGloss
from .syntax import (
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
    Term,
    Variable,
)

_PLACEHOLDER_RE = re.compile(r"\bx([0-9]+)\b")


def _term_text(t: Term, g: Glossary) -> str:
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, Constant):
        try:
            return g.constant_meanings[t.name]
        except KeyError:
            raise MissingGloss(t.name) from None
    raise MissingGloss(t.name)  # function symbols carry no glossary meaning


def _fill(template: str, args: tuple[Term, ...], g: Glossary) -> str:
    def repl(m: re.Match) -> str:
        idx = int(m.group(1))
        if not 1 <= idx <= len(args):
            raise MissingGloss(f"x{idx}")
        return _term_text(args[idx - 1], g)

    return _PLACEHOLDER_RE.sub(repl, template)


def _atom_text(f: Atom, g: Glossary, positive: bool) -> str:
    gloss = g.predicate_meanings.get(f.predicate)
    if gloss is None:
        raise MissingGloss(f.predicate)
    return _fill(gloss.positive if positive else gloss.negative, f.args, g)


def _render(f: Formula, g: Glossary, paren: bool) -> str:
    def group(text: str) -> str:
        return f"({text})" if paren else text

    if isinstance(f, Atom):
        return _atom_text(f, g, positive=True)
    if isinstance(f, Not):
        if isinstance(f.operand, Atom):
            return _atom_text(f.operand, g, positive=False)
        return group(f"it's false that {_render(f.operand, g, paren)}")
    if isinstance(f, And):
        return group(f"{_render(f.left, g, paren)} and {_render(f.right, g, paren)}")
    if isinstance(f, Or):
        return group(f"{_render(f.left, g, paren)} or {_render(f.right, g, paren)}")
    if isinstance(f, Implies):
        return group(f"if {_render(f.left, g, paren)}, then {_render(f.right, g, paren)}")
    if isinstance(f, Iff):
        return group(f"{_render(f.left, g, paren)} if and only if {_render(f.right, g, paren)}")
    if isinstance(f, Exists):
        return group(f"there is {f.var} such that {_render(f.body, g, paren)}")
    return group(f"for all {f.var} {_render(f.body, g, paren)}")


def translate(f: Formula, g: Glossary, *, parenthesized: bool = False) -> str:
    """Render f as an English sentence using the glossary g.

    Output is whitespace-normalized, ends with a period, and starts with an
    uppercase character.  Raises MissingGloss when g does not cover a symbol.
    """
    text = _render(f, g, parenthesized)
    if parenthesized and text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    text = re.sub(r"\s+", " ", text).strip()
    text = re.sub(r"\s+([,.;:!?])", r"\1", text)
    text = text + "."
    return text[0].upper() + text[1:]
