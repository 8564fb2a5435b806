"""Immutable expression trees in one variable with named parameters.

Nodes are frozen dataclasses. The operator overloads and the module level
builders (``add``, ``mul``, ...) fold constants and drop neutral elements;
nothing else is simplified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "abs")

Number = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {value!r} as an exact number")


class Expr:
    """Base node. Arithmetic operators build new trees."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __str__(self):
        from .printer import to_text

        return to_text(self)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Constant(as_fraction(value))


@dataclass(frozen=True)
class Constant(Expr):
    value: Fraction
    fvalue: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "value", as_fraction(self.value))
        object.__setattr__(self, "fvalue", float(self.value))


@dataclass(frozen=True)
class Variable(Expr):
    name: str


@dataclass(frozen=True)
class Parameter(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", as_fraction(self.exponent))


@dataclass(frozen=True)
class Apply(Expr):
    func: str
    arg: Expr

    def __post_init__(self):
        if self.func not in FUNCTIONS:
            raise ValueError(f"unsupported function {self.func!r}")


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


BINARY = (Add, Sub, Mul, Div)


def const(value) -> Constant:
    return Constant(as_fraction(value))


ZERO = Constant(Fraction(0))
ONE = Constant(Fraction(1))


def is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Constant):
        return False
    return value is None or e.value == value


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(a.value + b.value)
    if is_const(a, 0):
        return b
    if is_const(b, 0):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(a.value - b.value)
    if is_const(b, 0):
        return a
    if is_const(a, 0):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Constant) and isinstance(b, Constant):
        return Constant(a.value * b.value)
    if is_const(a, 0) or is_const(b, 0):
        return ZERO
    if is_const(a, 1):
        return b
    if is_const(b, 1):
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Constant) and isinstance(b, Constant) and b.value != 0:
        return Constant(a.value / b.value)
    if is_const(b, 1):
        return a
    if is_const(a, 0) and not is_const(b, 0):
        return ZERO
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Constant):
        return Constant(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(base: Expr, exponent) -> Expr:
    exponent = as_fraction(exponent)
    if exponent == 1:
        return base
    if exponent == 0:
        return ONE
    if isinstance(base, Constant) and exponent.denominator == 1:
        if not (base.value == 0 and exponent < 0):
            return Constant(base.value ** int(exponent))
    return Pow(base, exponent)


def apply(func: str, arg: Expr) -> Expr:
    return Apply(func, arg)


def walk(e: Expr):
    """Yield every node of ``e`` in pre-order."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, BINARY):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, (Apply, Neg)):
            stack.append(node.arg)


def parameters(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Parameter)}


def variables(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Variable)}
