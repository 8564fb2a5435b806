"""Numerical evaluation of expression trees.

:func:`evaluate` walks the tree and reports the offending node on failure.
:func:`compile_scalar` and :func:`compile_array` generate Python source for
the same arithmetic; they are used in hot loops (integrators, grids).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from ..errors import DomainError, UnboundName
from .expr import Add, Apply, Constant, Div, Expr, Mul, Neg, Parameter, Pow, Sub, Variable, parameters


def rational_power(x: float, r: Fraction) -> float:
    p, q = r.numerator, r.denominator
    if x == 0.0:
        if r < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return 0.0
    if q == 1:
        return x**p
    if x < 0:
        if q % 2 == 0:
            raise ValueError("negative base with even root")
        mag = math.pow(-x, p / q)
        return -mag if p % 2 else mag
    return math.pow(x, p / q)


def _apply(func: str, x: float) -> float:
    if func == "exp":
        return math.exp(x)
    if func == "log":
        if x <= 0:
            raise ValueError("log of non-positive number")
        return math.log(x)
    if func == "sqrt":
        return math.sqrt(x)
    if func == "sin":
        return math.sin(x)
    if func == "cos":
        return math.cos(x)
    return abs(x)


def _overflow(sign: float) -> float:
    return math.copysign(math.inf, sign)


def evaluate(e: Expr, x: float, params: Mapping[str, float] | None = None) -> float:
    """IEEE-double value of ``e`` with every variable set to ``x``.

    Overflow produces a signed infinity; undefined operations raise
    :class:`DomainError` naming the node.
    """
    params = params or {}

    def ev(node: Expr) -> float:
        if isinstance(node, Constant):
            return node.fvalue
        if isinstance(node, Variable):
            return x
        if isinstance(node, Parameter):
            try:
                return float(params[node.name])
            except KeyError:
                raise UnboundName(node.name) from None
        if isinstance(node, Neg):
            return -ev(node.arg)
        if isinstance(node, Add):
            return ev(node.left) + ev(node.right)
        if isinstance(node, Sub):
            return ev(node.left) - ev(node.right)
        if isinstance(node, Mul):
            return ev(node.left) * ev(node.right)
        if isinstance(node, Div):
            num, den = ev(node.left), ev(node.right)
            if den == 0.0:
                raise DomainError(f"division by zero in {node}", node, x)
            return num / den
        if isinstance(node, Pow):
            base = ev(node.base)
            try:
                return rational_power(base, node.exponent)
            except OverflowError:
                odd = node.exponent.numerator % 2 == 1
                return _overflow(-1.0 if (base < 0 and odd) else 1.0)
            except (ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"{exc} in {node}", node, x) from None
        if isinstance(node, Apply):
            arg = ev(node.arg)
            try:
                return _apply(node.func, arg)
            except OverflowError:
                return math.inf
            except ValueError as exc:
                raise DomainError(f"{exc} in {node}", node, x) from None
        raise TypeError(f"not an expression node: {node!r}")

    return ev(e)


def _codegen(e: Expr, names: dict[str, str]) -> str:
    if isinstance(e, Constant):
        return repr(e.fvalue)
    if isinstance(e, Variable):
        return "x"
    if isinstance(e, Parameter):
        return names[e.name]
    if isinstance(e, Neg):
        return f"(-{_codegen(e.arg, names)})"
    if isinstance(e, (Add, Sub, Mul, Div)):
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
        return f"({_codegen(e.left, names)} {op} {_codegen(e.right, names)})"
    if isinstance(e, Pow):
        r = e.exponent
        base = _codegen(e.base, names)
        if r.denominator == 1:
            return f"_ipow({base}, {r.numerator})"
        return f"_rpow({base}, {r.numerator}, {r.denominator})"
    if isinstance(e, Apply):
        return f"_{e.func}({_codegen(e.arg, names)})"
    raise TypeError(f"not an expression node: {e!r}")


def _scalar_namespace() -> dict:
    def _ipow(b, n):
        return b**n

    def _rpow(b, p, q):
        return rational_power(b, Fraction(p, q))

    def _log(v):
        if v <= 0:
            raise ValueError("log of non-positive number")
        return math.log(v)

    return {
        "_ipow": _ipow,
        "_rpow": _rpow,
        "_exp": math.exp,
        "_log": _log,
        "_sqrt": math.sqrt,
        "_sin": math.sin,
        "_cos": math.cos,
        "_abs": abs,
    }


def _array_namespace() -> dict:
    def _ipow(b, n):
        return np.power(b, n)

    def _rpow(b, p, q):
        b = np.asarray(b, dtype=float)
        if q % 2 == 1:
            mag = np.power(np.abs(b), p / q)
            return np.where(b < 0, -mag if p % 2 else mag, mag)
        return np.power(b, p / q)

    def _log(v):
        v = np.asarray(v, dtype=float)
        return np.log(np.where(v > 0, v, np.nan))

    return {
        "_ipow": _ipow,
        "_rpow": _rpow,
        "_exp": np.exp,
        "_log": _log,
        "_sqrt": np.sqrt,
        "_sin": np.sin,
        "_cos": np.cos,
        "_abs": np.abs,
    }


def _compile(e: Expr, params: Mapping[str, float] | None, namespace: dict) -> Callable:
    params = dict(params or {})
    names = {}
    for i, node_name in enumerate(sorted(parameters(e))):
        if node_name not in params:
            raise UnboundName(node_name)
        names[node_name] = f"_p{i}"
        namespace[f"_p{i}"] = float(params[node_name])
    src = f"def _f(x):\n    return {_codegen(e, names)}\n"
    exec(compile(src, "<expr>", "exec"), namespace)
    return namespace["_f"]


def compile_scalar(e: Expr, params: Mapping[str, float] | None = None) -> Callable[[float], float]:
    """Fast float -> float evaluator; undefined points raise DomainError."""
    raw = _compile(e, params, _scalar_namespace())

    def f(x: float) -> float:
        try:
            return raw(x)
        except (ZeroDivisionError, ValueError) as exc:
            raise DomainError(f"{exc} at x={x!r}", e, x) from None
        except OverflowError:
            return evaluate(e, x, params)

    f.expr = e
    return f


def compile_array(e: Expr, params: Mapping[str, float] | None = None) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised evaluator; undefined points come back as nan or inf."""
    raw = _compile(e, params, _array_namespace())

    def f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = raw(x)
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy()

    f.expr = e
    return f


def evaluate_grid(e: Expr, xs, params: Mapping[str, float] | None = None) -> np.ndarray:
    """Evaluate on an array of points; raise DomainError at the first bad one."""
    xs = np.asarray(xs, dtype=float)
    values = compile_array(e, params)(xs)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        # the tree walk names the node (or confirms a genuine overflow)
        v = evaluate(e, float(xs[i]), params)
        raise DomainError(f"non-finite value {v!r} at node {i} (x={xs[i]!r})", e, float(xs[i]))
    return values
