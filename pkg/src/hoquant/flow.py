"""Hamiltonian flow of H = p^2 + V(q).

Hamilton's equations for this mass convention give the field
``(dq/dt, dp/dt) = (2p, -V'(q))``; the factor 2 is deliberate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .dsl import Potential
from .errors import BlowUp, DomainError, NotEquilibrium
from .verdict import Verdict

BLOWUP_THRESHOLD = 1e12
MAX_HALVINGS = 6


@dataclass(frozen=True)
class PhaseState:
    q: float
    p: float

    def __iter__(self):
        yield self.q
        yield self.p

    @property
    def norm(self) -> float:
        return abs(self.q) + abs(self.p)


@dataclass(frozen=True)
class HamiltonianField:
    """Separable field: dq/dt = velocity(p), dp/dt = force(q)."""

    velocity: Callable[[float], float]
    force: Callable[[float], float]
    energy: Callable[[float, float], float]

    def __call__(self, state: PhaseState) -> tuple[float, float]:
        return self.velocity(state.p), self.force(state.q)


def hamiltonian_field(V: Potential) -> HamiltonianField:
    dV = V.fast_d1
    value = V.fast_value
    domain = V.domain

    def force(q: float) -> float:
        if not domain.contains(q):
            raise DomainError(f"q={q!r} left the domain", V.expr, q)
        return -dV(q)

    def energy(q: float, p: float) -> float:
        if not domain.contains(q):
            raise DomainError(f"q={q!r} left the domain", V.expr, q)
        return p * p + value(q)

    return HamiltonianField(lambda p: 2.0 * p, force, energy)


def zero_field() -> HamiltonianField:
    return HamiltonianField(lambda p: 0.0, lambda q: 0.0, lambda q, p: 0.0)


@dataclass
class Trajectory:
    times: list[float] = field(default_factory=list)
    states: list[PhaseState] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    step: float = 0.0
    method: str = "stormer-verlet"
    step_drift: float = 0.0  # max |H - H0| over every step, recorded or not

    def append(self, t: float, state: PhaseState, H: float):
        self.times.append(t)
        self.states.append(state)
        self.energies.append(H)

    @property
    def max_energy_drift(self) -> float:
        H0 = self.energies[0]
        return max(self.step_drift, max(abs(h - H0) for h in self.energies))

    @property
    def final(self) -> PhaseState:
        return self.states[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "q", "p", "H"])
        for t, s, h in zip(self.times, self.states, self.energies):
            w.writerow([repr(t), repr(s.q), repr(s.p), repr(h)])
        return buf.getvalue()


def _leapfrog_step(field: HamiltonianField, q: float, p: float, f: float, h: float):
    """Kick-drift-kick; ``f`` is the force at ``q``. Returns (q, p, force at new q)."""
    p_half = p + 0.5 * h * f
    q_new = q + h * field.velocity(p_half)
    f_new = field.force(q_new)
    p_new = p_half + 0.5 * h * f_new
    return q_new, p_new, f_new


def integrate(
    field: HamiltonianField,
    x0: PhaseState,
    h: float,
    T: float,
    record_every: int = 1,
    threshold: float = BLOWUP_THRESHOLD,
) -> Trajectory:
    """Störmer-Verlet (leapfrog) integration from ``x0`` over [0, T].

    A step that pushes |q|+|p| above ``threshold`` (or leaves the potential's
    domain) is retried with half the step; after ``MAX_HALVINGS`` failed
    retries :class:`BlowUp` is raised. A negative ``h`` integrates backwards
    in time for a duration ``T``.
    """
    if h == 0 or not math.isfinite(h):
        raise ValueError("step must be finite and non-zero")
    if T <= 0:
        raise ValueError("horizon must be positive")
    traj = Trajectory(step=h)
    q, p = x0.q, x0.p
    f = field.force(q)
    t = 0.0
    H0 = field.energy(q, p)
    traj.append(t, PhaseState(q, p), H0)
    h_cur = h
    halvings = 0
    # t = seg_start + seg_steps * h_cur avoids accumulating round-off in t
    seg_start, seg_steps, taken = 0.0, 0, 0
    while abs(t) + 0.5 * abs(h_cur) < T:
        try:
            q_new, p_new, f_new = _leapfrog_step(field, q, p, f, h_cur)
            ok = math.isfinite(q_new) and math.isfinite(p_new) and abs(q_new) + abs(p_new) <= threshold
            reason = "state norm exceeded threshold"
        except (DomainError, OverflowError, ZeroDivisionError) as exc:
            ok, reason = False, f"potential unevaluable: {exc}"
        if not ok:
            if halvings >= MAX_HALVINGS:
                raise BlowUp(t, PhaseState(q, p), reason, traj)
            halvings += 1
            h_cur *= 0.5
            seg_start, seg_steps = t, 0
            continue
        q, p, f = q_new, p_new, f_new
        seg_steps += 1
        taken += 1
        t = seg_start + seg_steps * h_cur
        H = field.energy(q, p)
        traj.step_drift = max(traj.step_drift, abs(H - H0))
        if taken % record_every == 0:
            traj.append(t, PhaseState(q, p), H)
    if traj.times[-1] != t:
        traj.append(t, PhaseState(q, p), field.energy(q, p))
    return traj


class EigenKind(str, Enum):
    ELLIPTIC = "elliptic-pair"
    HYPERBOLIC = "hyperbolic-pair"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Linearization:
    at: PhaseState
    jacobian: tuple[tuple[float, float], tuple[float, float]]
    eigen_kind: EigenKind
    frequency_or_rate: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(np.array(self.jacobian, dtype=float))

    def to_json(self) -> dict:
        return {
            "at": {"q": self.at.q, "p": self.at.p},
            "jacobian": [list(row) for row in self.jacobian],
            "eigen_kind": self.eigen_kind.value,
            "frequency_or_rate": self.frequency_or_rate,
        }


def hessian_tolerance(scale: float) -> float:
    return 1e-8 * max(1.0, abs(scale))


def linearize(V: Potential, eq: PhaseState, tol: float = 1e-6, hess_scale: float | None = None) -> Linearization:
    """Jacobian of the field at an equilibrium: [[0, 2], [-V''(q0), 0]]."""
    dV = V.derivative(eq.q, 1)
    if abs(2.0 * eq.p) + abs(dV) > tol:
        raise NotEquilibrium(f"field at ({eq.q}, {eq.p}) is ({2 * eq.p}, {-dV}), not zero")
    d2 = V.derivative(eq.q, 2)
    jac = ((0.0, 2.0), (-d2, 0.0))
    det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]  # = 2 V''
    cut = 2.0 * hessian_tolerance(d2 if hess_scale is None else hess_scale)
    if det > cut:
        return Linearization(eq, jac, EigenKind.ELLIPTIC, math.sqrt(det))
    if det < -cut:
        return Linearization(eq, jac, EigenKind.HYPERBOLIC, math.sqrt(-det))
    return Linearization(eq, jac, EigenKind.DEGENERATE, 0.0)


@dataclass(frozen=True)
class CompletenessResult:
    verdict: Verdict
    reason: str  # by-proposition | blow-up | no-escape
    evidence: tuple[dict, ...] = ()

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "reason": self.reason, "evidence": list(self.evidence)}


def default_samples(V: Potential, extra_positions: Sequence[float] = (), count: int = 7) -> list[PhaseState]:
    lo, hi = V.domain.finite_window(10.0)
    pad = (hi - lo) / (count + 1)
    positions = [lo + pad * (i + 1) for i in range(count)] + list(extra_positions)
    return [PhaseState(q, p) for q in positions for p in (0.0, 1.0)]


def completeness_probe(
    V: Potential,
    samples: Sequence[PhaseState] | None = None,
    T_max: float = 10.0,
    h: float = 1e-2,
    proper: Verdict | None = None,
    bounded_below: Verdict | None = None,
) -> CompletenessResult:
    """Numerical completeness verdict for X_H.

    Proper and bounded below H gives completeness outright. Otherwise each
    sample is integrated to ``T_max``; any blow-up means incomplete, and no
    escape at all is only inconclusive (the sufficient condition has no
    converse).
    """
    if proper is None or bounded_below is None:
        from .critical import check_bounded_below, check_proper

        if proper is None:
            proper = check_proper(V).verdict
        if bounded_below is None:
            bounded_below = check_bounded_below(V).verdict
    if proper is Verdict.TRUE and bounded_below is Verdict.TRUE:
        return CompletenessResult(Verdict.TRUE, "by-proposition")
    field_ = hamiltonian_field(V)
    if samples is None:
        samples = default_samples(V)
    escapes = []
    for s in samples:
        try:
            integrate(field_, s, h, T_max, record_every=10**9)
        except BlowUp as exc:
            escapes.append({"q": s.q, "p": s.p, "t_star": exc.t_star, "reason": exc.reason})
        except DomainError:
            continue  # sample itself outside the domain
    if escapes:
        return CompletenessResult(Verdict.FALSE, "blow-up", tuple(escapes))
    return CompletenessResult(Verdict.INCONCLUSIVE, "no-escape")
