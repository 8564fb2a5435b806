"""Symbolic derivative and substitution."""

from __future__ import annotations

from fractions import Fraction

from .expr import (
    ONE,
    ZERO,
    Add,
    Apply,
    Constant,
    Div,
    Expr,
    Mul,
    Neg,
    Parameter,
    Pow,
    Sub,
    Variable,
    add,
    apply,
    const,
    div,
    mul,
    neg,
    power,
    sub,
)


def diff(e: Expr, var: str = "q") -> Expr:
    """Exact derivative of ``e`` with respect to the variable ``var``.

    Parameters and variables with other names are treated as constants.
    """
    if isinstance(e, (Constant, Parameter)):
        return ZERO
    if isinstance(e, Variable):
        return ONE if e.name == var else ZERO
    if isinstance(e, Neg):
        return neg(diff(e.arg, var))
    if isinstance(e, Add):
        return add(diff(e.left, var), diff(e.right, var))
    if isinstance(e, Sub):
        return sub(diff(e.left, var), diff(e.right, var))
    if isinstance(e, Mul):
        return add(mul(diff(e.left, var), e.right), mul(e.left, diff(e.right, var)))
    if isinstance(e, Div):
        da, db = diff(e.left, var), diff(e.right, var)
        first = div(da, e.right)
        if db == ZERO:
            return first
        return sub(first, div(mul(e.left, db), power(e.right, 2)))
    if isinstance(e, Pow):
        db = diff(e.base, var)
        if db == ZERO:
            return ZERO
        r = e.exponent
        return mul(mul(Constant(r), power(e.base, r - 1)), db)
    if isinstance(e, Apply):
        da = diff(e.arg, var)
        if da == ZERO:
            return ZERO
        a = e.arg
        if e.func == "exp":
            outer = e
        elif e.func == "log":
            return div(da, a)
        elif e.func == "sqrt":
            return div(da, mul(const(2), e))
        elif e.func == "sin":
            outer = apply("cos", a)
        elif e.func == "cos":
            outer = neg(apply("sin", a))
        else:  # abs
            outer = div(a, e)
        return mul(outer, da)
    raise TypeError(f"not an expression node: {e!r}")


def nth_diff(e: Expr, n: int, var: str = "q") -> Expr:
    for _ in range(n):
        e = diff(e, var)
    return e


def substitute(e: Expr, var: str, replacement: Expr) -> Expr:
    """Replace every ``Variable(var)`` (or ``Parameter(var)``) by ``replacement``."""
    if isinstance(e, Constant):
        return e
    if isinstance(e, (Variable, Parameter)):
        return replacement if e.name == var else e
    if isinstance(e, Neg):
        return neg(substitute(e.arg, var, replacement))
    if isinstance(e, Pow):
        return power(substitute(e.base, var, replacement), e.exponent)
    if isinstance(e, Apply):
        return apply(e.func, substitute(e.arg, var, replacement))
    left = substitute(e.left, var, replacement)
    right = substitute(e.right, var, replacement)
    builder = {Add: add, Sub: sub, Mul: mul, Div: div}[type(e)]
    return builder(left, right)


def bind(e: Expr, values: dict[str, Fraction | int]) -> Expr:
    """Substitute exact constants for parameters."""
    for name, value in values.items():
        e = substitute(e, name, const(value))
    return e
