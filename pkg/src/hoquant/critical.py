"""Stationary points of a potential and the harmonic-oscillator integrability verdict.

The verdict combines two sufficient conditions:

(i)  H is proper and bounded below, or
(ii) X_H is complete and has an elliptic critical point.

Properness and boundedness are decided numerically from geometric probe
sequences toward each end of the domain, with an explicit inconclusive state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dsl import Expr, Potential, const
from .dsl.expr import Variable, add, mul, power, sub
from .errors import DegenerateCritical, DomainError, GridError
from .flow import (
    CompletenessResult,
    EigenKind,
    PhaseState,
    completeness_probe,
    default_samples,
    hessian_tolerance,
    linearize,
)
from .grid import GridSpec
from .verdict import Verdict

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Kind(str, Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class CriticalPoint:
    q0: float
    value: float
    second_deriv: float
    kind: Kind
    hess_scale: float = 1.0

    @property
    def morse_index(self) -> int | None:
        return {Kind.ELLIPTIC: 0, Kind.HYPERBOLIC: 1}.get(self.kind)

    def to_json(self) -> dict:
        return {
            "q0": self.q0,
            "value": self.value,
            "second_deriv": self.second_deriv,
            "morse_index": self.morse_index,
            "kind": self.kind.value,
        }


def default_probe_grid(V: Potential, points: int = 4001, extent: float = 10.0) -> GridSpec:
    lo, hi = V.domain.finite_window(extent)
    return GridSpec(lo, hi, points)


def _safe(f, x: float) -> float:
    try:
        v = f(x)
    except (DomainError, OverflowError, ZeroDivisionError, ValueError):
        return math.nan
    return v


def _bisect_root(f, a: float, b: float, fa: float, scale: float) -> float:
    width = 1e-12 * scale
    while b - a > width:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = _safe(f, m)
        if math.isnan(fm):
            break
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _golden_min_abs(f, a: float, b: float, scale: float) -> float:
    """Minimise |f| on [a, b]; used for roots where f touches zero without crossing."""
    g = lambda x: abs(_safe(f, x))  # noqa: E731
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    while b - a > 1e-12 * scale:
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + GOLDEN * (b - a)
            gd = g(d)
    return 0.5 * (a + b)


def classify(second_deriv: float, hess_scale: float) -> Kind:
    tol = hessian_tolerance(hess_scale)
    if second_deriv > tol:
        return Kind.ELLIPTIC
    if second_deriv < -tol:
        return Kind.HYPERBOLIC
    return Kind.DEGENERATE


def find_critical_points(V: Potential, probe_grid: GridSpec | None = None) -> list[CriticalPoint]:
    """Stationary points of V located on a probe grid and refined.

    Sign changes of V' between neighbouring nodes are refined by bisection.
    Local minima of |V'| without a sign change (touching roots such as q^3 at
    0) are refined by golden-section search. A candidate is kept only if
    |V'(q0)| < 1e-9 (1 + max|V'| on the grid).
    """
    g = probe_grid or default_probe_grid(V)
    xs = g.nodes
    xs = xs[[V.domain.contains(x) for x in xs]]
    d1 = V.array_d1(xs)
    valid = np.isfinite(d1)
    if valid.sum() < 2:
        raise GridError("fewer than 2 valid probe nodes")
    xs, d1 = xs[valid], d1[valid]
    d2_nodes = V.array_d2(xs)
    grad_scale = float(np.max(np.abs(d1)))
    grad_tol = 1e-9 * (1.0 + grad_scale)
    fd1 = V.fast_d1
    step = g.h

    candidates: list[tuple[float, int]] = []
    n = len(xs)
    for i in range(n - 1):
        a, b, fa, fb = xs[i], xs[i + 1], d1[i], d1[i + 1]
        if b - a > 1.5 * step:
            continue  # a gap of invalid nodes (pole) lies between
        if fa == 0.0:
            candidates.append((float(a), i))
        elif fa * fb < 0:
            scale = max(1.0, abs(a), abs(b))
            candidates.append((_bisect_root(fd1, float(a), float(b), float(fa), scale), i))
    if d1[-1] == 0.0:
        candidates.append((float(xs[-1]), n - 1))
    for i in range(1, n - 1):
        fa, fm, fb = abs(d1[i - 1]), abs(d1[i]), abs(d1[i + 1])
        if fm == 0.0 or not (fm <= fa and fm <= fb):
            continue
        if d1[i - 1] * d1[i + 1] < 0 or xs[i + 1] - xs[i - 1] > 2.5 * step:
            continue
        scale = max(1.0, abs(xs[i]))
        candidates.append((_golden_min_abs(fd1, float(xs[i - 1]), float(xs[i + 1]), scale), i))

    points: list[CriticalPoint] = []
    for q0, i in sorted(candidates):
        if points and q0 - points[-1].q0 < step:
            continue
        grad = _safe(fd1, q0)
        if math.isnan(grad) or abs(grad) >= grad_tol:
            continue  # pole or shallow dip, not a stationary point
        lo, hi = max(0, i - 2), min(n, i + 3)
        hess_scale = float(np.max(np.abs(d2_nodes[lo:hi][np.isfinite(d2_nodes[lo:hi])]), initial=1.0))
        d2 = V.derivative(q0, 2)
        points.append(CriticalPoint(q0, V(q0), d2, classify(d2, hess_scale), hess_scale))
    return points


def morse_quadratic_part(cp: CriticalPoint, var: str = "q") -> Expr:
    """Local model value + (V''/2)(q - q0)^2.

    The coefficient is positive at a minimum and negative at a maximum, the
    signs of the normal forms +q^2 and -q^2.
    """
    if cp.kind is Kind.DEGENERATE:
        raise DegenerateCritical(f"critical point at q0={cp.q0} is degenerate")
    q = Variable(var)
    if cp.q0 == 0:
        shifted = q
    elif cp.q0 > 0:
        shifted = sub(q, const(repr(cp.q0)))
    else:
        shifted = add(q, const(repr(-cp.q0)))
    # repr keeps the shortest decimal, so the printed model stays readable
    half = cp.second_deriv / 2
    quad = mul(const(repr(abs(half))), power(shifted, 2))
    return add(const(repr(cp.value)), quad) if half > 0 else sub(const(repr(cp.value)), quad)


@dataclass(frozen=True)
class BoundaryProbeSpec:
    ratio: float = 10.0
    depth: int = 12
    tail: int = 4
    tol: float = 1e-6
    interior_points: int = 2001
    extent: float = 10.0


@dataclass
class Trail:
    end: str  # "lower" | "upper"
    points: list[tuple[float, float]] = field(default_factory=list)
    closed: bool = False

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.points]

    def behaviour(self, tol: float, tail: int) -> str:
        """One of diverges-up, diverges-down, settles, decreasing, undetermined, closed."""
        if self.closed:
            return "closed"
        v = self.values
        if v and math.isinf(v[-1]):
            return "diverges-up" if v[-1] > 0 else "diverges-down"
        if len(v) < tail:
            return "undetermined"
        t = v[-tail:]
        diffs = [b - a for a, b in zip(t, t[1:])]
        big = 1.0 / tol
        if all(d > 0 for d in diffs) and t[-1] > big:
            return "diverges-up"
        if all(d < 0 for d in diffs) and t[-1] < -big:
            return "diverges-down"
        last, prev = abs(diffs[-1]), abs(diffs[-2])
        if abs(t[-1]) < big and (last <= tol * (1.0 + abs(t[-1])) or last <= 0.5 * prev):
            return "settles"
        if all(d < 0 for d in diffs):
            return "decreasing"
        return "undetermined"

    def to_json(self) -> list[dict]:
        return [{"q": q, "V": _num(v)} for q, v in self.points]


def _num(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


def boundary_trails(V: Potential, probe: BoundaryProbeSpec = BoundaryProbeSpec()) -> tuple[Trail, Trail]:
    dom = V.domain
    lo, hi = dom.finite_window(probe.extent)
    step = (hi - lo) / (probe.interior_points + 1)
    trails = []
    for end in ("lower", "upper"):
        edge = dom.lower if end == "lower" else dom.upper
        closed = dom.lower_closed if end == "lower" else dom.upper_closed
        sign = 1.0 if end == "lower" else -1.0
        trail = Trail(end, closed=closed)
        if closed:
            trail.points.append((edge, _safe(V, edge)))
            trails.append(trail)
            continue
        for j in range(probe.depth):
            if math.isinf(edge):
                anchor = 0.0 if math.isinf(dom.lower) and math.isinf(dom.upper) else (
                    dom.upper if end == "lower" else dom.lower
                )
                x = anchor - sign * probe.ratio**j
            else:
                x = edge + sign * step * probe.ratio ** (-j)
            try:
                v = V(x)
            except DomainError:
                break
            if math.isnan(v):
                break
            trail.points.append((x, v))
        trails.append(trail)
    return trails[0], trails[1]


def interior_values(V: Potential, probe: BoundaryProbeSpec = BoundaryProbeSpec()) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = V.domain.finite_window(probe.extent)
    xs = GridSpec(lo, hi, probe.interior_points).nodes
    vals = V.array_value(xs)
    ok = np.isfinite(vals)
    return xs[ok], vals[ok]


@dataclass
class Check:
    verdict: Verdict
    note: str
    trails: tuple[Trail, Trail]
    estimate: float | None = None

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "note": self.note,
            "evidence": {t.end: t.to_json() for t in self.trails},
        }
        if self.estimate is not None:
            out["inf_estimate"] = _num(self.estimate)
        return out


def check_bounded_below(V: Potential, probe: BoundaryProbeSpec = BoundaryProbeSpec()) -> Check:
    trails = boundary_trails(V, probe)
    _, inner = interior_values(V, probe)
    candidates = list(inner) + [v for t in trails for v in t.values]
    inf_est = float(min(candidates)) if candidates else None
    kinds = {t.end: t.behaviour(probe.tol, probe.tail) for t in trails}
    down = [end for end, k in kinds.items() if k == "diverges-down"]
    if down:
        return Check(Verdict.FALSE, f"V decreases without bound toward the {' and '.join(down)} end", trails, inf_est)
    unsure = [end for end, k in kinds.items() if k in ("decreasing", "undetermined")]
    if unsure:
        return Check(
            Verdict.INCONCLUSIVE, f"no stable lower bound along the {' and '.join(unsure)} probe", trails, inf_est
        )
    return Check(Verdict.TRUE, "running infimum stabilises at both ends", trails, inf_est)


def check_proper(V: Potential, probe: BoundaryProbeSpec = BoundaryProbeSpec()) -> Check:
    """|V| -> infinity at every open end (automatic at closed finite ends).

    For V bounded below this is V -> +infinity at both ends; a finite limit at
    either end makes a sublevel set non-compact.
    """
    trails = boundary_trails(V, probe)
    kinds = {t.end: t.behaviour(probe.tol, probe.tail) for t in trails}
    settles = [end for end, k in kinds.items() if k == "settles"]
    if settles:
        return Check(Verdict.FALSE, f"V tends to a finite limit toward the {' and '.join(settles)} end", trails)
    if all(k in ("diverges-up", "diverges-down", "closed") for k in kinds.values()):
        return Check(Verdict.TRUE, "|V| diverges at every open end", trails)
    unsure = [end for end, k in kinds.items() if k not in ("diverges-up", "diverges-down", "closed")]
    return Check(Verdict.INCONCLUSIVE, f"no monotone divergence along the {' and '.join(unsure)} probe", trails)


@dataclass
class IntegrabilityReport:
    bounded_below: Check
    proper: Check
    field_complete: CompletenessResult
    critical_points: list[CriticalPoint]
    ho_integrable: Verdict
    rationale: str

    @property
    def elliptic_points(self) -> list[CriticalPoint]:
        return [c for c in self.critical_points if c.kind is Kind.ELLIPTIC]

    def to_json(self) -> dict:
        return {
            "bounded_below": self.bounded_below.to_json(),
            "proper": self.proper.to_json(),
            "field_complete": self.field_complete.to_json(),
            "elliptic_points": [c.to_json() for c in self.elliptic_points],
            "ho_integrable": self.ho_integrable.value,
            "rationale": self.rationale,
        }


def hocond_verdict(
    V: Potential,
    probe: BoundaryProbeSpec = BoundaryProbeSpec(),
    probe_grid: GridSpec | None = None,
    flow_horizon: float = 10.0,
) -> IntegrabilityReport:
    bounded = check_bounded_below(V, probe)
    proper = check_proper(V, probe)
    points = find_critical_points(V, probe_grid)
    elliptic = [c for c in points if c.kind is Kind.ELLIPTIC]
    samples = default_samples(V, [c.q0 for c in elliptic])
    complete = completeness_probe(
        V, samples, T_max=flow_horizon, proper=proper.verdict, bounded_below=bounded.verdict
    )
    branch_i = bounded.verdict & proper.verdict
    branch_ii = complete.verdict & Verdict.of(bool(elliptic))
    verdict = branch_i | branch_ii
    if branch_i is Verdict.TRUE:
        why = "condition (i): H is proper and bounded below"
    elif branch_ii is Verdict.TRUE:
        why = "condition (ii): X_H is complete with an elliptic critical point"
    else:
        parts = [
            f"(i) bounded_below={bounded.verdict.value}, proper={proper.verdict.value} -> {branch_i.value}",
            f"(ii) complete={complete.verdict.value}, elliptic points={len(elliptic)} -> {branch_ii.value}",
        ]
        why = "; ".join(parts)
    return IntegrabilityReport(bounded, proper, complete, points, verdict, why)


def classification_agrees(V: Potential, cp: CriticalPoint) -> bool:
    """The Hessian sign and the linearised flow give the same kind."""
    lin = linearize(V, PhaseState(cp.q0, 0.0), tol=max(1e-6, 1e-9 * (1 + abs(cp.value))), hess_scale=cp.hess_scale)
    expected = {
        Kind.ELLIPTIC: EigenKind.ELLIPTIC,
        Kind.HYPERBOLIC: EigenKind.HYPERBOLIC,
        Kind.DEGENERATE: EigenKind.DEGENERATE,
    }[cp.kind]
    return lin.eigen_kind is expected
