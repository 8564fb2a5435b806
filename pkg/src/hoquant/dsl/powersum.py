"""Exact expansion into sums of rational-power monomials.

A monomial is ``coeff * prod(p_i^f_i) * x^e * prod(param_j^k_j)`` with a
rational ``coeff``, primes ``p_i`` raised to fractional parts ``0 < f_i < 1``,
and rational exponents ``e`` and ``k_j``. Expansion is valid for ``x > 0`` and
positive parameters whenever a fractional power is taken; it is used to read
exact coefficients off conjugated operators.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

from ..errors import NotPowerSum
from .expr import Add, Apply, Constant, Div, Expr, Mul, Neg, Parameter, Pow, Sub, Variable

# key: (x exponent, params tuple, radicals tuple)
Key = tuple[Fraction, tuple[tuple[str, Fraction], ...], tuple[tuple[int, Fraction], ...]]
PowerSum = dict[Key, Fraction]


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _merge(a, b):
    acc = dict(a)
    for k, v in b:
        acc[k] = acc.get(k, Fraction(0)) + v
    return acc


def _normalize(coeff: Fraction, x_exp, params: dict, radicals: dict):
    """Pull integer parts of radical exponents into the rational coefficient."""
    rads = []
    for p, f in sorted(radicals.items()):
        whole = f.numerator // f.denominator
        frac = f - whole
        coeff *= Fraction(p) ** whole
        if frac:
            rads.append((p, frac))
    pars = tuple(sorted((k, v) for k, v in params.items() if v != 0))
    return coeff, (Fraction(x_exp), pars, tuple(rads))


def _term(coeff, x_exp=0, params=None, radicals=None) -> PowerSum:
    coeff, key = _normalize(Fraction(coeff), x_exp, params or {}, radicals or {})
    return {key: coeff} if coeff else {}


def _add(a: PowerSum, b: PowerSum, sign: int = 1) -> PowerSum:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + sign * v
        if out[k] == 0:
            del out[k]
    return out


def _mul(a: PowerSum, b: PowerSum) -> PowerSum:
    out: dict = defaultdict(Fraction)
    for (ea, pa, ra), ca in a.items():
        for (eb, pb, rb), cb in b.items():
            coeff, key = _normalize(ca * cb, ea + eb, _merge(pa, pb), _merge(ra, rb))
            out[key] += coeff
    return {k: v for k, v in out.items() if v}


def _pow(a: PowerSum, r: Fraction) -> PowerSum:
    if not a:
        if r <= 0:
            raise NotPowerSum("zero raised to a non-positive power")
        return {}
    if len(a) == 1:
        ((x_exp, pars, rads), coeff), = a.items()
        if coeff < 0 and r.denominator % 2 == 0:
            raise NotPowerSum("negative coefficient under an even root")
        sign = -1 if (coeff < 0 and r.numerator % 2) else 1
        radicals: dict[int, Fraction] = {}
        for p, k in _factor(abs(coeff.numerator)).items():
            radicals[p] = radicals.get(p, Fraction(0)) + k * r
        for p, k in _factor(coeff.denominator).items():
            radicals[p] = radicals.get(p, Fraction(0)) - k * r
        for p, f in rads:
            radicals[p] = radicals.get(p, Fraction(0)) + f * r
        params = {k: v * r for k, v in pars}
        return _term(sign, x_exp * r, params, radicals)
    if r.denominator == 1 and r >= 0:
        out = _term(1)
        for _ in range(int(r)):
            out = _mul(out, a)
        return out
    raise NotPowerSum("non-integer or negative power of a sum")


def power_sum(e: Expr) -> PowerSum:
    """Expand ``e`` exactly; raise :class:`NotPowerSum` if impossible."""
    if isinstance(e, Constant):
        return _term(e.value)
    if isinstance(e, Variable):
        return _term(1, 1)
    if isinstance(e, Parameter):
        return _term(1, 0, {e.name: Fraction(1)})
    if isinstance(e, Neg):
        return {k: -v for k, v in power_sum(e.arg).items()}
    if isinstance(e, Add):
        return _add(power_sum(e.left), power_sum(e.right))
    if isinstance(e, Sub):
        return _add(power_sum(e.left), power_sum(e.right), -1)
    if isinstance(e, Mul):
        return _mul(power_sum(e.left), power_sum(e.right))
    if isinstance(e, Div):
        den = power_sum(e.right)
        if len(den) != 1:
            raise NotPowerSum("division by a sum")
        return _mul(power_sum(e.left), _pow(den, Fraction(-1)))
    if isinstance(e, Pow):
        return _pow(power_sum(e.base), e.exponent)
    if isinstance(e, Apply):
        raise NotPowerSum(f"transcendental function {e.func}")
    raise TypeError(f"not an expression node: {e!r}")


def coefficient(ps: PowerSum, x_exponent, params: dict | None = None) -> Fraction:
    """Rational coefficient of ``x^x_exponent * params`` with no radical factor."""
    pars = tuple(sorted((k, Fraction(v)) for k, v in (params or {}).items() if v))
    return ps.get((Fraction(x_exponent), pars, ()), Fraction(0))
