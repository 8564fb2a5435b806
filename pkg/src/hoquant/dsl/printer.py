"""Render expression trees back into parseable text."""

from __future__ import annotations

from fractions import Fraction

from .expr import Add, Apply, Constant, Div, Expr, Mul, Neg, Parameter, Pow, Sub, Variable

# binding strength; higher binds tighter
_SUM, _PRODUCT, _FACTOR, _POWER, _ATOM = 1, 2, 3, 4, 5


def _is_terminating(value: Fraction) -> bool:
    d = value.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def _format_fraction(value: Fraction) -> tuple[str, int]:
    """Text and binding strength for a non-negative constant."""
    if value.denominator == 1:
        return str(value.numerator), _ATOM
    if _is_terminating(value):
        # exact decimal expansion
        digits = 0
        while (value * 10**digits).denominator != 1:
            digits += 1
        scaled = value * 10**digits
        text = str(scaled.numerator).rjust(digits + 1, "0")
        text = text[:-digits] + "." + text[-digits:]
        return text, _ATOM
    return f"({value.numerator}/{value.denominator})", _ATOM


def format_exponent(r: Fraction) -> str:
    if r.denominator == 1 and r > 0:
        return str(r.numerator)
    if r.denominator == 1:
        return f"({r.numerator})"
    return f"({r.numerator}/{r.denominator})"


def _render(e: Expr) -> tuple[str, int]:
    if isinstance(e, Constant):
        if e.value < 0:
            text, _ = _format_fraction(-e.value)
            return "-" + text, _FACTOR
        return _format_fraction(e.value)
    if isinstance(e, (Variable, Parameter)):
        return e.name, _ATOM
    if isinstance(e, Apply):
        return f"{e.func}({to_text(e.arg)})", _ATOM
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _ATOM)}^{format_exponent(e.exponent)}", _POWER
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _POWER), _FACTOR
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        return _wrap(e.left, _SUM) + op + _wrap(e.right, _PRODUCT), _SUM
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        return _wrap(e.left, _PRODUCT) + op + _wrap(e.right, _FACTOR), _PRODUCT
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(e: Expr, minimum: int) -> str:
    text, strength = _render(e)
    return text if strength >= minimum else f"({text})"


def to_text(e: Expr) -> str:
    return _render(e)[0]
