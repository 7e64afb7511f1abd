"""Formula parser for Unicode and ASCII first-order syntax.

Operator precedence, tightest first: {negation, quantifiers}, and, or,
implies, iff.  Conjunction and disjunction associate to the left, implication
and bi-implication to the right.  Negation binds to the smallest formula that
follows it, while a quantifier's scope extends to the end of the enclosing
parenthesized group, so

    ∀x Country(x) ∧ InEU(x) → EUCountry(x)

parses as the universal closure of the whole implication.  ASCII aliases are
accepted on input (forall, exists, !, &, |, ->, <->); canonical printing uses
the Unicode operators.

XOR is rejected by default.  Passing expand_xor=True instead rewrites
a ⊕ b into (a ∨ b) ∧ ¬(a ∧ b) at parse time.

When no signature is supplied the parser infers one: an applied identifier in
formula position becomes a predicate, an applied identifier in term position
a function, a bound identifier a variable, and any other bare identifier a
constant unless it looks like a conventional variable name (u..z with an
optional numeric suffix).
"""

from __future__ import annotations

import re
import warnings
from typing import NamedTuple

from .ontology import ArityMismatch, Signature, UnknownSymbol
from .syntax import (
    And,
    Atom,
    Constant,
    Exists,
    FolbenchError,
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


class FormulaSyntaxError(FolbenchError):
    def __init__(self, message: str, position: int, expected: str | None = None):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class XorUnsupported(FormulaSyntaxError):
    def __init__(self, position: int):
        super().__init__("XOR operator is not supported (pass expand_xor=True to expand it)", position)


class VariableShadowingWarning(UserWarning):
    pass


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<comma>,)
      | (?P<iff><->|↔)
      | (?P<implies>->|→)
      | (?P<and>&|∧)
      | (?P<or>\||∨)
      | (?P<not>!|¬)
      | (?P<xor>⊕)
      | (?P<forall>∀)
      | (?P<exists>∃)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"forall": "forall", "exists": "exists", "xor": "xor"}

# Bare identifiers of this shape are read as variables when no signature is
# given; everything else unbound is read as a constant.
_VARIABLE_SHAPE = re.compile(r"[u-z][0-9]*")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup or ""
        value = m.group()
        pos = m.end()
        if kind == "ws":
            continue
        if kind == "ident" and value in _KEYWORDS:
            kind = _KEYWORDS[value]
        tokens.append(Token(kind, value, m.start()))
    return tokens


def tokenize_texts(text: str) -> list[str]:
    """Token surface strings, used by symbol-level metrics."""
    return [t.text for t in tokenize(text)]


class _Parser:
    def __init__(self, text: str, sig: Signature | None, expand_xor: bool):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.sig = sig
        self.expand_xor = expand_xor
        self.scope: list[str] = []
        # inference mode bookkeeping
        self.inferred_preds: dict[str, int] = {}
        self.inferred_consts: set[str] = set()
        self.inferred_funcs: dict[str, int] = {}

    # -- token helpers ------------------------------------------------------

    def _peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self) -> Token:
        tok = self._peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def _expect(self, kind: str, expected: str) -> Token:
        tok = self._peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", len(self.text), expected)
        if tok.kind != kind:
            raise FormulaSyntaxError(f"unexpected token {tok.text!r}", tok.pos, expected)
        self.i += 1
        return tok

    # -- grammar ------------------------------------------------------------

    def parse(self) -> Formula:
        f = self._iff()
        tok = self._peek()
        if tok is not None:
            raise FormulaSyntaxError(f"unexpected token {tok.text!r}", tok.pos, "end of input")
        return f

    def _iff(self) -> Formula:
        left = self._implies()
        tok = self._peek()
        if tok is not None and tok.kind == "iff":
            self.i += 1
            return Iff(left, self._iff())
        return left

    def _implies(self) -> Formula:
        left = self._xor()
        tok = self._peek()
        if tok is not None and tok.kind == "implies":
            self.i += 1
            return Implies(left, self._implies())
        return left

    def _xor(self) -> Formula:
        left = self._or()
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "xor":
                return left
            self.i += 1
            if not self.expand_xor:
                raise XorUnsupported(tok.pos)
            right = self._or()
            left = And(Or(left, right), Not(And(left, right)))

    def _or(self) -> Formula:
        left = self._and()
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "or":
                return left
            self.i += 1
            left = Or(left, self._and())

    def _and(self) -> Formula:
        left = self._unary()
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "and":
                return left
            self.i += 1
            left = And(left, self._unary())

    def _unary(self) -> Formula:
        tok = self._peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", len(self.text), "a formula")
        if tok.kind == "not":
            self.i += 1
            return Not(self._unary())
        if tok.kind in ("forall", "exists"):
            self.i += 1
            var = self._expect("ident", "a quantified variable")
            self._check_var_name(var)
            if var.text in self.scope:
                warnings.warn(
                    f"variable {var.text!r} shadows an enclosing binder",
                    VariableShadowingWarning,
                    stacklevel=4,
                )
            self.scope.append(var.text)
            try:
                body = self._iff()  # maximal scope
            finally:
                self.scope.pop()
            return Forall(var.text, body) if tok.kind == "forall" else Exists(var.text, body)
        if tok.kind == "lparen":
            self.i += 1
            f = self._iff()
            self._expect("rparen", "')'")
            return f
        if tok.kind == "ident":
            return self._atom()
        raise FormulaSyntaxError(f"unexpected token {tok.text!r}", tok.pos, "a formula")

    def _check_var_name(self, tok: Token) -> None:
        if self.sig is not None and tok.text in self.sig.all_names:
            raise FormulaSyntaxError(
                f"quantified variable {tok.text!r} collides with a declared symbol", tok.pos
            )
        if self.sig is None and (
            tok.text in self.inferred_preds
            or tok.text in self.inferred_consts
            or tok.text in self.inferred_funcs
        ):
            raise FormulaSyntaxError(
                f"quantified variable {tok.text!r} collides with an inferred symbol", tok.pos
            )

    def _atom(self) -> Formula:
        name = self._expect("ident", "a predicate")
        args: list[Term] = []
        applied = False
        tok = self._peek()
        if tok is not None and tok.kind == "lparen":
            applied = True
            self.i += 1
            if self._peek() is not None and self._peek().kind != "rparen":
                args.append(self._term())
                while self._peek() is not None and self._peek().kind == "comma":
                    self.i += 1
                    args.append(self._term())
            self._expect("rparen", "')'")
        if self.sig is not None:
            declared = self.sig.predicates.get(name.text)
            if declared is None:
                if name.text in self.sig.constants or name.text in self.sig.functions:
                    raise FormulaSyntaxError(
                        f"{name.text!r} is not a predicate", name.pos, "a predicate"
                    )
                raise UnknownSymbol(name.text, "not a declared predicate")
            if declared != len(args):
                raise ArityMismatch(name.text, declared, len(args))
        else:
            if name.text in self.inferred_consts or name.text in self.inferred_funcs:
                raise FormulaSyntaxError(
                    f"{name.text!r} used both as predicate and as term", name.pos
                )
            seen = self.inferred_preds.get(name.text)
            if seen is not None and seen != len(args):
                raise ArityMismatch(name.text, seen, len(args))
            self.inferred_preds[name.text] = len(args)
        if not applied and self.sig is None and _VARIABLE_SHAPE.fullmatch(name.text):
            # A bare lowercase short identifier is far more plausibly a
            # variable than a 0-ary predicate; keep inference conservative.
            del self.inferred_preds[name.text]
            raise FormulaSyntaxError(
                f"bare identifier {name.text!r} cannot stand alone as a formula", name.pos
            )
        return Atom(name.text, tuple(args))

    def _term(self) -> Term:
        name = self._expect("ident", "a term")
        tok = self._peek()
        if tok is not None and tok.kind == "lparen":
            self.i += 1
            args = [self._term()]
            while self._peek() is not None and self._peek().kind == "comma":
                self.i += 1
                args.append(self._term())
            self._expect("rparen", "')'")
            if self.sig is not None:
                declared = self.sig.functions.get(name.text)
                if declared is None:
                    raise UnknownSymbol(name.text, "not a declared function")
                if declared != len(args):
                    raise ArityMismatch(name.text, declared, len(args))
            else:
                if name.text in self.inferred_preds or name.text in self.inferred_consts:
                    raise FormulaSyntaxError(
                        f"{name.text!r} used in conflicting namespaces", name.pos
                    )
                seen = self.inferred_funcs.get(name.text)
                if seen is not None and seen != len(args):
                    raise ArityMismatch(name.text, seen, len(args))
                self.inferred_funcs[name.text] = len(args)
            return FunctionApp(name.text, tuple(args))

        if name.text in self.scope:
            return Variable(name.text)
        if self.sig is not None:
            if name.text in self.sig.constants:
                return Constant(name.text)
            if name.text in self.sig.functions:
                raise FormulaSyntaxError(
                    f"function {name.text!r} used without arguments", name.pos
                )
            if name.text in self.sig.predicates:
                raise FormulaSyntaxError(
                    f"predicate {name.text!r} used in term position", name.pos
                )
            return Variable(name.text)  # free variable
        if name.text in self.inferred_consts:
            return Constant(name.text)
        if name.text in self.inferred_preds or name.text in self.inferred_funcs:
            raise FormulaSyntaxError(f"{name.text!r} used in conflicting namespaces", name.pos)
        if _VARIABLE_SHAPE.fullmatch(name.text):
            return Variable(name.text)
        self.inferred_consts.add(name.text)
        return Constant(name.text)


def parse_formula(text: str, sig: Signature | None = None, *, expand_xor: bool = False) -> Formula:
    """Parse text into a Formula.

    With a signature, every predicate, constant, and function must be
    declared (UnknownSymbol otherwise) and used at its declared arity
    (ArityMismatch otherwise); undeclared bare identifiers are variables.
    Without a signature the vocabulary is inferred from usage.
    """
    if not text.strip():
        raise FormulaSyntaxError("empty input", 0, "a formula")
    return _Parser(text, sig, expand_xor).parse()
