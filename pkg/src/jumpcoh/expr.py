"""Tiny recursive-descent parser for exact polynomial expressions.

Grammar::

    expr   := [+|-] term ((+|-) term)*
    term   := power ((*|/) power)*          # '/' only by a numeric literal
    power  := atom [^ INT]
    atom   := INT | NAME | ( expr )

``⊗``, ``∧`` and ``·`` are read as ``*``.  The name ``i`` is the imaginary
unit unless the caller's resolver claims it.
"""

from __future__ import annotations

import re
from typing import Callable

from .errors import ParseError
from .scalars import GaussianRational, Jet, ParamSet, gaussian

__all__ = ["evaluate", "parse_gaussian", "parse_jet", "parse_vector"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    text = text.replace("⊗", "*").replace("∧", "*").replace("·", "*")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif name is not None:
            tokens.append(("name", name))
        elif op is not None and not op.isspace():
            if op not in "+-*/^()":
                raise ParseError(f"unexpected character {op!r} in {text!r}")
            tokens.append(("op", op))
    return tokens


class _Parser:
    def __init__(self, text: str, resolve: Callable[[str], object], lift: Callable[[GaussianRational], object]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.resolve = resolve
        self.lift = lift

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r} in {self.text!r}")

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression")
        value = self.expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return value

    def expr(self):
        kind, val = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        value = self.term()
        if negate:
            value = -value
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if val == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                value = _mul(value, self.power())
            elif kind == "op" and val == "/":
                self.take()
                kind2, num = self.take()
                if kind2 != "num" or int(num) == 0:
                    raise ParseError(f"division only by a nonzero integer in {self.text!r}")
                value = _mul(value, self.lift(GaussianRational(1) / int(num)))
            else:
                return value

    def power(self):
        value = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind2, num = self.take()
            if kind2 != "num":
                raise ParseError(f"exponent must be an integer in {self.text!r}")
            value = value ** int(num)
        return value

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.lift(gaussian(int(val)))
        if kind == "name":
            return self.resolve(val)
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(f"unexpected token {val!r} in {self.text!r}")


def _mul(a, b):
    try:
        result = a * b
    except TypeError:
        result = NotImplemented
    if result is NotImplemented:
        result = b * a
    return result


def evaluate(text: str, resolve: Callable[[str], object], lift: Callable[[GaussianRational], object] = lambda c: c):
    """Evaluate ``text``; names go through ``resolve`` and constants through ``lift``."""
    return _Parser(text, resolve, lift).parse()


def _imaginary_only(name: str):
    if name == "i":
        return GaussianRational(0, 1)
    raise ParseError(f"unknown name {name!r}")


def parse_gaussian(text: str) -> GaussianRational:
    value = evaluate(text, _imaginary_only)
    return gaussian(value)


def parse_jet(text: str, params: ParamSet, order: int) -> Jet:
    def resolve(name: str):
        if name in params.names:
            return Jet.variable(params, order, name)
        if name == "i":
            return Jet.constant(params, order, GaussianRational(0, 1))
        raise ParseError(f"unknown parameter {name!r}; expected one of {', '.join(params.names) or '(none)'}")

    return evaluate(text, resolve, lambda c: Jet.constant(params, order, c))


def parse_vector(text: str) -> list[GaussianRational]:
    """Comma-separated Gaussian-rational literals, e.g. ``1,0,1/2,i``."""
    parts = [p for p in text.split(",")]
    if any(not p.strip() for p in parts):
        raise ParseError(f"empty entry in vector {text!r}")
    return [parse_gaussian(p) for p in parts]
