"""Minimal S-expression reader for SMT-LIB2 scripts.

Atoms are returned as strings (quoted symbols |...| are unwrapped), lists as
Python lists.  Line comments start with ';'.
"""

from __future__ import annotations


class SexprError(ValueError):
    pass


def _tokens(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SexprError("unterminated quoted symbol")
            yield text[i + 1 : j]
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise SexprError("unterminated string literal")
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()|;":
                j += 1
            yield text[i:j]
            i = j


def parse_all(text: str) -> list:
    """Parse every toplevel form in text."""
    stack: list[list] = []
    top: list = []
    for tok in _tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise SexprError("unbalanced ')'")
            done = stack.pop()
            (stack[-1] if stack else top).append(done)
        else:
            (stack[-1] if stack else top).append(tok)
    if stack:
        raise SexprError("unbalanced '('")
    return top
