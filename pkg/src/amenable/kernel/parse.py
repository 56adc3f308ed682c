"""Element expressions.

Grammar (whitespace ignored)::

    expr     := [sign] term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := "-" factor | power
    power    := atom ["^" exponent]
    exponent := ["-"] INT | "(" ["-"] INT ")"
    atom     := INT ["/" INT] | NAME | "(" expr ")"

``INT "/" INT`` is a rational literal. Negative exponents are accepted
only for single group words in group algebras.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .element import AlgebraElement
from .families import Family

_TOKEN = re.compile(r"(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S)")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}" + (f" in {text!r}" if text else ""))
        self.pos = pos


def _tokenize(text: str) -> list:
    toks = []
    for m in _TOKEN.finditer(text):
        start = m.start()
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            toks.append((ch, ch, start))
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, family: Family, text: str):
        self.family = family
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2], self.text)
        self.i += 1
        return tok

    def expr(self) -> AlgebraElement:
        neg = False
        if self.peek()[0] in ("+", "-"):
            neg = self.take()[0] == "-"
        acc = self.term()
        if neg:
            acc = -acc
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> AlgebraElement:
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> AlgebraElement:
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        return self.power()

    def power(self) -> AlgebraElement:
        base = self.atom()
        if self.peek()[0] != "^":
            return base
        self.take()
        paren = self.peek()[0] == "("
        if paren:
            self.take()
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        tok = self.take("int")
        if paren:
            self.take(")")
        e = sign * tok[1]
        if e < 0:
            if not self.family.is_group:
                raise ParseError(f"negative exponent outside a group algebra ({self.family})", tok[2], self.text)
            try:
                base = base.inverse()
            except ValueError as exc:
                raise ParseError(str(exc), tok[2], self.text) from None
            e = -e
        return base ** e

    def atom(self) -> AlgebraElement:
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            q = Fraction(val)
            if self.peek()[0] == "/":
                self.take()
                den = self.take("int")
                if den[1] == 0:
                    raise ParseError("zero denominator", den[2], self.text)
                q = Fraction(val, den[1])
            return AlgebraElement.scalar(self.family, q)
        if kind == "name":
            self.take()
            try:
                return AlgebraElement.generator(self.family, val)
            except KeyError:
                raise ParseError(
                    f"unknown generator {val!r} for {self.family} (have {', '.join(self.family.generator_names)})",
                    pos, self.text) from None
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        raise ParseError(f"unexpected {'end of input' if kind == 'end' else repr(val)}", pos, self.text)


def parse(family: Family, text: str) -> AlgebraElement:
    p = _Parser(family, text)
    if p.peek()[0] == "end":
        raise ParseError("empty expression", 0, text)
    e = p.expr()
    if p.peek()[0] != "end":
        tok = p.peek()
        raise ParseError(f"unexpected {tok[1]!r}", tok[2], text)
    return e


def parse_list(family: Family, text: str) -> list:
    """Comma-separated expressions (commas inside parentheses are not supported)."""
    return [parse(family, part) for part in text.split(",") if part.strip()]
