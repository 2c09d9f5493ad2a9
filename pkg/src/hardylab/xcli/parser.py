"""Recursive-descent parser for LE-function expressions.

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | factor
    factor := atom ('^' rational)?
    atom   := 't' | number | name | '(' expr ')' | ('log'|'exp'|'sqrt') '(' expr ')'
    rational := ['-'] integer | '(' ['-'] integer ['/' integer] ')' | decimal

``name`` is one of the named constants pi, e and sqrt2.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError
from ..lefun import numbers as nb
from ..lefun.expr import LEFunction, const, exp, log, power, sqrt, t

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)
_FUNCS = {"log": log, "exp": exp, "sqrt": sqrt}
_ATOM_START = ("t", "number", "(", "log", "exp", "sqrt", "-") + tuple(sorted(nb.NAMED))


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens = []
        i = 0
        while i < len(text):
            if text[i:].strip() == "":
                break
            m = _TOKEN.match(text, i)
            if not m:
                j = i
                while j < len(text) and text[j].isspace():
                    j += 1
                raise ParseError(f"unexpected character {text[j]!r}", self._byte(j), _ATOM_START)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            i = m.end()
        self.tokens.append(("end", "", len(text)))

    def _byte(self, char_offset: int) -> int:
        return len(self.text[:char_offset].encode("utf-8"))

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected, msg=None):
        kind, val, off = self.peek()
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(msg or f"unexpected {what}", self._byte(off), expected)

    def expect(self, op: str):
        kind, val, _ = self.peek()
        if kind == "op" and val == op:
            self.take()
            return
        self.fail((op,))

    # grammar ------------------------------------------------------------
    def parse(self) -> LEFunction:
        if self.peek()[0] == "end":
            self.fail(_ATOM_START, "empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(("+", "-", "*", "/", "^", "end of input"))
        return e

    def expr(self) -> LEFunction:
        out = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                out = out + rhs if val == "+" else out - rhs
            else:
                return out

    def term(self) -> LEFunction:
        out = self.unary()
        while True:
            kind, val, off = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                if val == "*":
                    out = out * rhs
                else:
                    if rhs.is_zero:
                        raise ParseError("division by zero", self._byte(off), ())
                    out = out / rhs
            else:
                return out

    def unary(self) -> LEFunction:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.unary()
        return self.factor()

    def factor(self) -> LEFunction:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            r = self.rational()
            return power(base, r)
        return base

    def rational(self) -> Fraction:
        kind, val, _ = self.peek()
        if kind == "num":
            self.take()
            return Fraction(val)
        if kind == "op" and val == "-":
            self.take()
            return -self.rational()
        if kind == "op" and val == "(":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            num = self._number()
            den = Fraction(1)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                off = self.peek()[2]
                den = self._number()
                if den == 0:
                    raise ParseError("zero denominator", self._byte(off), ("number",))
            self.expect(")")
            return sign * num / den
        self.fail(("number", "-", "("))

    def _number(self) -> Fraction:
        kind, val, _ = self.peek()
        if kind != "num":
            self.fail(("number",))
        self.take()
        return Fraction(val)

    def atom(self) -> LEFunction:
        kind, val, off = self.peek()
        if kind == "num":
            self.take()
            return const(Fraction(val))
        if kind == "name":
            if val == "t":
                self.take()
                return t
            if val in _FUNCS:
                self.take()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[val](arg)
            if val in nb.NAMED:
                self.take()
                return const(nb.NAMED[val])
            raise ParseError(f"unknown name {val!r}", self._byte(off), _ATOM_START)
        if kind == "op" and val == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        self.fail(_ATOM_START)


def parse_lefun(text: str) -> LEFunction:
    """Parse an LE-function expression in the variable t."""
    if not isinstance(text, str):
        raise TypeError("expected a string")
    return _Parser(text).parse()
