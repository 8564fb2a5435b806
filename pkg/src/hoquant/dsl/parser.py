"""Recursive-descent parser for the potential language.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := ['-'] power
    power    := atom ['^' rational]
    atom     := number | name | name '(' expr ')' | '(' expr ')'
    rational := ['-'] integer | '(' ['-'] integer ['/' integer] ')'

Offsets in errors are byte offsets into the UTF-8 encoded input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ExprSyntaxError, UnknownFunction
from .expr import FUNCTIONS, Add, Apply, Constant, Div, Expr, Mul, Neg, Parameter, Pow, Sub, Variable

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | end
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    if not text.isascii():
        bad = next(i for i, ch in enumerate(text) if not ch.isascii())
        raise ExprSyntaxError("non-ASCII character", len(text[:bad].encode("utf-8")))
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            raise ExprSyntaxError("unexpected character", pos, ("number", "name", "operator"))
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, variable: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.variable = variable

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str):
        if not self.at(text):
            raise ExprSyntaxError(f"expected {text!r}", self.tok.offset, (text,))
        self.advance()

    def expr(self) -> Expr:
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            right = self.term()
            node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            right = self.factor()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def factor(self) -> Expr:
        if self.at("-"):
            self.advance()
            return Neg(self.power())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at("^"):
            self.advance()
            return Pow(base, self.rational())
        return base

    def _integer(self) -> int:
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            raise ExprSyntaxError("expected an integer exponent", t.offset, ("integer",))
        self.advance()
        return sign * int(t.text)

    def rational(self) -> Fraction:
        if self.at("("):
            self.advance()
            num = self._integer()
            den = 1
            if self.at("/"):
                self.advance()
                t = self.tok
                den = self._integer()
                if den == 0:
                    raise ExprSyntaxError("zero denominator in exponent", t.offset, ("integer",))
            self.expect(")")
            return Fraction(num, den)
        if self.tok.kind == "end":
            raise ExprSyntaxError("unexpected end of input", self.tok.offset, ("integer", "("))
        return Fraction(self._integer())

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Constant(Fraction(t.text))
        if t.kind == "name":
            self.advance()
            if self.at("("):
                if t.text not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {t.text!r}", t.offset, FUNCTIONS)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Apply(t.text, arg)
            if t.text in FUNCTIONS:
                raise ExprSyntaxError(f"function {t.text!r} needs an argument", self.tok.offset, ("(",))
            if t.text == self.variable:
                return Variable(t.text)
            return Parameter(t.text)
        if self.at("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "end":
            raise ExprSyntaxError("unexpected end of input", t.offset, ("number", "name", "("))
        raise ExprSyntaxError(f"unexpected {t.text!r}", t.offset, ("number", "name", "("))


def parse(text: str, variable: str = "q") -> Expr:
    """Parse ``text`` into an expression tree.

    ``variable`` names the independent variable; every other identifier that is
    not a function name becomes a :class:`Parameter`.
    """
    p = _Parser(text, variable)
    node = p.expr()
    if p.tok.kind != "end":
        raise ExprSyntaxError(f"unexpected {p.tok.text!r}", p.tok.offset, ("+", "-", "*", "/", "end"))
    return node
