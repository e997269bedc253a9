"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace-insensitive)::

    expr   := term (('+'|'-') term)*
    term   := power (['*'] power)*        # juxtaposition multiplies: 2g, 3x0
    power  := ('+'|'-') power | atom ['^' INT]
    atom   := INT | NAME | '(' expr ')'

``g`` names the extension generator. The unicode minus sign is accepted.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .ff import FieldSpec
from .poly import Poly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def tokenize(text: str, line: int | None = None, col0: int = 0):
    text = text.replace("−", "-")
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            toks.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None and not m.group(3).isspace():
            ch = m.group(3)
            if ch not in "+-*^()":
                raise ParseError(f"unexpected character {ch!r}", line, col0 + m.start(3) + 1)
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, field: FieldSpec, names, line, col0):
        self.field = field
        self.names = {n: i for i, n in enumerate(names)}
        self.nvars = len(names)
        self.line = line
        self.col0 = col0
        self.toks = tokenize(text, line, col0)
        self.i = 0

    def error(self, msg, tok=None):
        tok = tok or self.toks[self.i]
        return ParseError(msg, self.line, self.col0 + tok[2] + 1)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def const(self, c):
        return Poly.constant(self.field, self.nvars, c)

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        acc = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Poly:
        acc = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                acc = acc * self.power()
            elif t[0] in ("int", "name") or (t[0] == "op" and t[1] == "("):
                acc = acc * self.power()
            else:
                return acc

    def power(self) -> Poly:
        t = self.peek()
        if t[0] == "op" and t[1] in ("+", "-"):
            self.take()
            inner = self.power()
            return -inner if t[1] == "-" else inner
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "int":
                raise self.error("exponent must be a non-negative integer", t)
            base = base ** int(t[1])
        return base

    def atom(self) -> Poly:
        t = self.take()
        kind, val = t[0], t[1]
        if kind == "int":
            return self.const(int(val))
        if kind == "name":
            if val in self.names:
                return Poly.var(self.field, self.nvars, self.names[val])
            if val == "g":
                if self.field.k == 1:
                    raise self.error("generator g is only available in extension fields", t)
                return Poly(self.field, self.nvars, {(0,) * self.nvars: self.field.generator})
            raise self.error(f"undeclared variable {val!r}", t)
        if kind == "op" and val == "(":
            inner = self.expr()
            close = self.take()
            if close[:2] != ("op", ")"):
                raise self.error("expected ')'", close)
            return inner
        raise self.error(f"unexpected {val!r}" if val else "unexpected end of expression", t)


def parse_poly(text: str, field: FieldSpec, names, line: int | None = None, col0: int = 0) -> Poly:
    """Parse ``text`` into a Poly over ``field`` in the variables ``names``."""
    return _Parser(text, field, list(names), line, col0).parse()
