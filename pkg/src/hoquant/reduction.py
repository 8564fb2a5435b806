"""Reduction of second-order operators to the translated harmonic oscillator (THO).

A plan conjugates the THO operator ``-d^2/dz^2 + omega^2 z^2 + rho z + lambda``
by the multiplier ``z^mu`` and rewrites it in ``q`` through ``z = (c q)^gamma``.
The conjugated operator is ``z^mu . op . z^-mu``, so the first-order term
cancels when ``mu = (1 - gamma) / (2 gamma)``. After normalising the leading
coefficient to -1 the zeroth-order coefficient is a Schrödinger potential
plus a constant energy shift.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

import numpy as np

from .dsl import Expr, Parameter, Potential, Variable, diff, parse, power_sum, substitute, to_text
from .dsl.evaluate import compile_array
from .dsl.expr import ONE, ZERO, add, apply, as_fraction, const, div, mul, neg, parameters, power, sub
from .errors import AiryCase, NonSchrodingerForm, NoRealSolution, NotPowerSum
from .grid import GridSpec

C1_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DiffOp2:
    """``c2 d^2 + c1 d + c0`` with coefficient expressions in ``var``."""

    c2: Expr
    c1: Expr
    c0: Expr
    var: str = "q"

    def apply(self, f: Expr) -> Expr:
        d1 = diff(f, self.var)
        d2 = diff(d1, self.var)
        return add(add(mul(self.c2, d2), mul(self.c1, d1)), mul(self.c0, f))

    def coefficients(self) -> dict[str, Expr]:
        return {"c2": self.c2, "c1": self.c1, "c0": self.c0}


def schrodinger(potential: Expr, var: str = "q") -> DiffOp2:
    return DiffOp2(const(-1), ZERO, potential, var)


def tho_operator(var: str = "z") -> DiffOp2:
    """``-d^2 + omega^2 z^2 + rho z + lambda`` with symbolic parameters."""
    z = Variable(var)
    w2 = power(Parameter("omega"), 2)
    c0 = add(add(mul(w2, power(z, 2)), mul(Parameter("rho"), z)), Parameter("lambda"))
    return schrodinger(c0, var)


@dataclass(frozen=True)
class THOParams:
    omega: float
    rho: float
    lam: float

    def as_params(self) -> dict[str, float]:
        return {"omega": self.omega, "rho": self.rho, "lambda": self.lam}

    @classmethod
    def from_params(cls, params: Mapping[str, float]) -> THOParams:
        return cls(float(params.get("omega", 1.0)), float(params.get("rho", 0.0)), float(params.get("lambda", 0.0)))


def tho_normalize(t: THOParams) -> tuple[float, float]:
    """``omega^2 z^2 + rho z + lambda = omega^2 (z + center)^2 + offset``."""
    if t.omega == 0:
        raise AiryCase("omega = 0: the operator is of Airy type, not an oscillator")
    w2 = t.omega * t.omega
    return t.rho / (2 * w2), t.lam - t.rho * t.rho / (4 * w2)


def gauge(op: DiffOp2, mu) -> DiffOp2:
    """``z^mu . op . z^-mu``: d -> d - mu/z inside every coefficient."""
    mu = as_fraction(mu)
    if mu == 0:
        return op
    z = Variable(op.var)
    m = const(mu)
    c1 = sub(op.c1, mul(mul(const(2 * mu), op.c2), power(z, -1)))
    c0 = add(op.c0, mul(mul(const(mu * (mu + 1)), op.c2), power(z, -2)))
    c0 = sub(c0, mul(mul(m, op.c1), power(z, -1)))
    return DiffOp2(op.c2, c1, c0, op.var)


def gauge_by(op: DiffOp2, u: Expr) -> DiffOp2:
    """``u^-1 . op . u`` for a multiplier function ``u`` in the operator's variable."""
    du = diff(u, op.var)
    ddu = diff(du, op.var)
    c1 = add(op.c1, mul(mul(const(2), op.c2), div(du, u)))
    c0 = add(add(op.c0, mul(op.c2, div(ddu, u))), mul(op.c1, div(du, u)))
    return DiffOp2(op.c2, canonical(c1), canonical(c0), op.var)


def change_variable(op: DiffOp2, s: Expr, var: str = "q") -> DiffOp2:
    """Rewrite an operator in ``z`` through ``z = s(q)`` and normalise c2 to -1.

    Uses d/dz = (1/s') d/dq and d^2/dz^2 = (1/s'^2) d^2/dq^2 - (s''/s'^3) d/dq,
    then multiplies through by ``-1/C2``.
    """
    sp = diff(s, var)
    spp = diff(sp, var)
    c2 = substitute(op.c2, op.var, s)
    c1 = substitute(op.c1, op.var, s)
    c0 = substitute(op.c0, op.var, s)
    C2 = div(c2, power(sp, 2))
    C1 = sub(div(c1, sp), div(mul(c2, spp), power(sp, 3)))
    scale = neg(div(ONE, C2))
    return DiffOp2(
        canonical(mul(C2, scale)), canonical(mul(C1, scale)), canonical(mul(c0, scale)), var
    )


def substitution(sub_scale, sub_exponent, var: str = "q") -> Expr:
    c, g = as_fraction(sub_scale), as_fraction(sub_exponent)
    if g == 0:
        raise ValueError("substitution exponent must be non-zero")
    if c <= 0:
        raise ValueError("substitution scale must be positive")
    return power(mul(const(c), Variable(var)), g)


def conjugate(
    op: DiffOp2,
    multiplier_exponent,
    sub_scale,
    sub_exponent,
    params: Mapping[str, float] | None = None,
    check_grid: GridSpec | None = None,
    substitute_first: bool = False,
) -> DiffOp2:
    """``z^mu . op . z^-mu`` expressed in q, checked for a vanishing first-order term.

    ``substitute_first`` swaps the order: rewrite in q, then conjugate by
    s(q)^mu. Both orders give the same operator.
    """
    s = substitution(sub_scale, sub_exponent)
    if substitute_first:
        out = gauge_by(change_variable(op, s), power(s, -as_fraction(multiplier_exponent)))
    else:
        out = change_variable(gauge(op, multiplier_exponent), s)
    worst = first_order_size(out, params, check_grid)
    if worst > C1_TOLERANCE:
        raise NonSchrodingerForm(worst)
    return out


def first_order_size(op: DiffOp2, params: Mapping[str, float] | None, grid: GridSpec | None) -> float:
    """max |c1| on the check grid; 0 when c1 vanishes identically."""
    try:
        if not power_sum(op.c1):
            return 0.0
    except NotPowerSum:
        pass
    grid = grid or GridSpec(0.3, 5.0, 200)
    values = np.abs(_sample(op.c1, grid.nodes, _params_for(op.c1, params)))
    return float(np.max(values))


def _params_for(e: Expr, params: Mapping[str, float] | None) -> dict[str, float]:
    # free symbols without a value default to 1 for the c1 check only
    p = dict(params or {})
    return {name: p.get(name, 1.0) for name in parameters(e)}


def _sample(e: Expr, xs: np.ndarray, params: Mapping[str, float]) -> np.ndarray:
    out = np.broadcast_to(compile_array(e, params)(xs), xs.shape)
    return np.asarray(out, dtype=float)


def sample_coefficients(op: DiffOp2, xs: np.ndarray, params: Mapping[str, float]) -> dict[str, np.ndarray]:
    return {k: _sample(e, xs, _params_for(e, params)) for k, e in op.coefficients().items()}


def canonical(e: Expr) -> Expr:
    """Expand to a sum of monomials when possible; otherwise return ``e``."""
    try:
        ps = power_sum(e)
    except NotPowerSum:
        return e
    return from_power_sum(ps)


def from_power_sum(ps: dict, var: str = "q") -> Expr:
    x = Variable(var)
    out: Expr | None = None
    for (x_exp, pars, rads), coeff in sorted(ps.items(), key=lambda kv: (-kv[0][0], kv[0][1], kv[0][2])):
        term: Expr = const(abs(coeff) if out is not None else coeff)
        for p, f in rads:
            term = mul(term, power(const(p), f))
        term = mul(term, power(x, x_exp))
        for name, k in pars:
            term = mul(term, power(Parameter(name), k))
        if out is None:
            out = term
        elif coeff < 0:
            out = sub(out, term)
        else:
            out = add(out, term)
    return ZERO if out is None else out


@dataclass(frozen=True)
class ReductionPlan:
    sub_scale: Fraction
    sub_exponent: Fraction
    multiplier_exponent: Fraction
    shift: Expr = ZERO
    name: str = ""
    target: str = ""  # built-in potential this plan certifies, if any

    def __post_init__(self):
        for attr in ("sub_scale", "sub_exponent", "multiplier_exponent"):
            object.__setattr__(self, attr, as_fraction(getattr(self, attr)))
        if self.sub_exponent == 0:
            raise ValueError("substitution exponent must be non-zero")

    @property
    def substitution(self) -> Expr:
        return substitution(self.sub_scale, self.sub_exponent)

    def conjugated(
        self, params: Mapping[str, float] | None = None, check_grid: GridSpec | None = None, substitute_first: bool = False
    ) -> DiffOp2:
        return conjugate(
            tho_operator(), self.multiplier_exponent, self.sub_scale, self.sub_exponent, params, check_grid, substitute_first
        )

    @property
    def induced_potential(self) -> Expr:
        """Conjugated c0 minus the energy shift."""
        return canonical(sub(self.conjugated().c0, self.shift))

    def energy_shift(self, params: Mapping[str, float]) -> float:
        return float(compile_array(self.shift, dict(params))(np.zeros(1))[0])

    @property
    def free_parameter(self) -> str | None:
        names = sorted(parameters(self.shift))
        if len(names) > 1:
            raise ValueError(f"shift {to_text(self.shift)} has several symbols: {names}")
        return names[0] if names else None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "sub_scale": _frac_text(self.sub_scale),
            "sub_exponent": _frac_text(self.sub_exponent),
            "multiplier_exponent": _frac_text(self.multiplier_exponent),
            "shift": to_text(self.shift),
            "target": self.target,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> ReductionPlan:
        return cls(
            Fraction(str(data["sub_scale"])),
            Fraction(str(data["sub_exponent"])),
            Fraction(str(data["multiplier_exponent"])),
            parse(str(data.get("shift", "0"))),
            str(data.get("name", "")),
            str(data.get("target", "")),
        )

    @classmethod
    def load(cls, path: str | Path) -> ReductionPlan:
        return cls.from_json(json.loads(Path(path).read_text()))


def _frac_text(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cancelling_exponent(sub_exponent) -> Fraction:
    """The mu that removes the first-order term for z = (c q)^gamma."""
    g = as_fraction(sub_exponent)
    return (1 - g) / (2 * g)


def inverse_square_constant(plan: ReductionPlan) -> Fraction:
    """Exact coefficient of q^-2 in the conjugated potential (-mu(mu+1) gamma^2)."""
    ps = power_sum(plan.conjugated().c0)
    return ps.get((Fraction(-2), (), ()), Fraction(0))


BUILTIN_PLANS: dict[str, ReductionPlan] = {
    "example1": ReductionPlan(Fraction(3, 2), Fraction(2, 3), Fraction(1, 4), Parameter("rho"), "example1", "example1"),
    "example2": ReductionPlan(
        Fraction(2), Fraction(1, 2), Fraction(1, 2), power(Parameter("omega"), 2), "example2", "example2"
    ),
    "identity": ReductionPlan(Fraction(1), Fraction(1), Fraction(0), ZERO, "identity", ""),
}


def get_plan(spec: str) -> ReductionPlan:
    """A built-in plan name or a path to a JSON plan file."""
    if spec in BUILTIN_PLANS:
        return BUILTIN_PLANS[spec]
    path = Path(spec.lstrip("@"))
    if path.exists():
        return ReductionPlan.load(path)
    raise KeyError(f"unknown plan {spec!r}; built-ins are {sorted(BUILTIN_PLANS)}")


@dataclass(frozen=True)
class ReductionResult:
    operator: DiffOp2
    residual: float
    parts: dict[str, float]
    shift_value: float


def reduction_check(
    plan: ReductionPlan, target: Potential, grid: GridSpec, tho: THOParams | None = None, substitute_first: bool = False
) -> ReductionResult:
    tho = tho or THOParams.from_params(target.params)
    params = {**target.params, **tho.as_params()}
    op = plan.conjugated(params, grid, substitute_first)
    xs = grid.nodes
    shift = plan.energy_shift(params)
    target_vals = target.array_value(xs)
    c = sample_coefficients(op, xs, params)
    parts = {
        "c0": float(np.max(np.abs(c["c0"] - (target_vals + shift)))),
        "c1": float(np.max(np.abs(c["c1"]))),
        "c2": float(np.max(np.abs(c["c2"] + 1.0))),
    }
    return ReductionResult(op, sum(parts.values()), parts, shift)


def reduction_residual(
    plan: ReductionPlan, target: Potential, grid: GridSpec, tho: THOParams | None = None, substitute_first: bool = False
) -> float:
    """max|c0 - (V + shift)| + max|c1| + max|c2 + 1| over the grid."""
    return reduction_check(plan, target, grid, tho, substitute_first).residual


PROVISIONAL = "full-line THO spectrum; provisional on a half-line domain"


@dataclass(frozen=True)
class Prediction:
    n: int
    parameter: str | None
    relation: str
    solutions: tuple[float, ...]
    energies: tuple[float, ...]
    note: str = PROVISIONAL

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "parameter": self.parameter,
            "relation": self.relation,
            "solutions": list(self.solutions),
            "energies": list(self.energies),
            "note": self.note,
        }


def predict_spectrum(plan: ReductionPlan, tho: THOParams, n_max: int) -> list[Prediction]:
    """Solve omega(2n+1) + offset = 0 for the shift's free symbol, n = 0..n_max.

    The remaining THO parameters are taken from ``tho``. Each solution gives
    the induced energy E_n = -shift.
    """
    free = plan.free_parameter
    out = []
    for n in range(n_max + 1):
        level = 2 * n + 1
        w, r, lam = tho.omega, tho.rho, tho.lam
        if free is None:
            center, offset = tho_normalize(tho)
            lhs = w * level + offset
            sols: tuple[float, ...] = ()
            relation = f"{w!r}*{level} + ({offset!r}) = {lhs!r}"
            energies = (0.0 - plan.energy_shift(tho.as_params()),) if math.isclose(lhs, 0.0, abs_tol=1e-12) else ()
            out.append(Prediction(n, None, relation, sols, energies))
            continue
        if free == "rho":
            if w == 0:
                raise AiryCase("omega = 0")
            radicand = lam + w * level
            if radicand < 0:
                raise NoRealSolution(f"n={n}: radicand lambda + omega*(2n+1) = {radicand!r} < 0")
            root = 2 * abs(w) * math.sqrt(radicand)
            sols = tuple(sorted({-root, root}))
            relation = f"rho^2 = 4*omega^2*(lambda + omega*{level})"
        elif free == "omega":
            # omega*(2n+1) + lambda - rho^2/(4 omega^2) = 0, times 4 omega^2
            roots = np.roots([4.0 * level, 4.0 * lam, 0.0, -r * r])
            sols = tuple(sorted(float(x.real) for x in roots if abs(x.imag) < 1e-12 and x.real > 0))
            if not sols:
                raise NoRealSolution(f"n={n}: no positive omega solves 4*{level}*w^3 + 4*lambda*w^2 - rho^2 = 0")
            relation = f"4*{level}*omega^3 + 4*lambda*omega^2 - rho^2 = 0"
        elif free == "lambda":
            if w == 0:
                raise AiryCase("omega = 0")
            sols = (r * r / (4 * w * w) - w * level,)
            relation = f"lambda = rho^2/(4*omega^2) - omega*{level}"
        else:
            raise ValueError(f"shift symbol {free!r} is not a THO parameter")
        energies = tuple(0.0 - plan.energy_shift({**tho.as_params(), free: x}) for x in sols)
        out.append(Prediction(n, free, relation, sols, energies))
    return out


def bound_state_energies(predictions: list[Prediction]) -> list[float]:
    """The positive-energy branch of each prediction (E_n > 0 when it exists)."""
    out = []
    for p in predictions:
        pos = [e for e in p.energies if e > 0]
        out.append(min(pos) if pos else (max(p.energies) if p.energies else math.nan))
    return out


@dataclass(frozen=True)
class PGParams:
    lam: Fraction
    mu: Fraction
    s: int

    def __post_init__(self):
        object.__setattr__(self, "lam", as_fraction(self.lam))
        object.__setattr__(self, "mu", as_fraction(self.mu))
        if self.s < 1:
            raise ValueError("s must be >= 1")


def pg_coefficients(p: PGParams) -> list[Fraction]:
    """C_k = (lambda + k) mu^k / k!, k = 0..s."""
    out = []
    fact = 1
    for k in range(p.s + 1):
        if k:
            fact *= k
        out.append((p.lam + k) * p.mu**k / fact)
    return out


def pg_expression(p: PGParams) -> Expr:
    q = Variable("q")
    poly: Expr = const(p.lam)
    for k, c in enumerate(pg_coefficients(p)):
        poly = add(poly, mul(const(c), power(q, 2 * k)))
    return mul(poly, apply("exp", neg(mul(const(p.mu), power(q, 2)))))


def pg_potential(p: PGParams) -> Potential:
    return Potential(pg_expression(p), name=f"pseudo-gaussian(lambda={p.lam}, mu={p.mu}, s={p.s})")


PG_MODEL_WARNING = "local quadratic model only; it does not preserve the spectrum of the full potential"


def pg_quadratic_model(p: PGParams) -> Expr:
    """lambda + mu^2 q^2 (see ``PG_MODEL_WARNING``)."""
    return add(const(p.lam), mul(const(p.mu**2), power(Variable("q"), 2)))
