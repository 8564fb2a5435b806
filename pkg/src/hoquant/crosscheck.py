"""Numerical comparison of a certified reduction with the THO it came from.

Two comparisons are offered on half-line Dirichlet grids:

* ``shift_comparison`` puts the q-side Schrödinger operator and the z-side
  THO on grids matched through ``z = s(q)`` and compares their lowest
  eigenvalues after subtracting the plan's energy shift.
* ``zero_mode_comparison`` uses the exact content of the conjugation: a zero
  mode of the THO with parameter rho_n is an eigenfunction of the q-side
  operator with energy -rho_n. It solves for rho_n such that the n-th THO
  level vanishes and compares -rho_n with the n-th q-side level.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dsl import Domain, Potential, evaluate
from .errors import NoRealSolution
from .grid import GridSpec
from .reduction import ReductionPlan, THOParams
from .spectral import fd_eigenvalues


def tho_potential(tho: THOParams) -> Potential:
    return Potential.from_text("omega^2*q^2 + rho*q + lambda", Domain.half_line(), tho.as_params(), "tho")


def matched_grids(plan: ReductionPlan, q_max: float, n: int) -> tuple[GridSpec, GridSpec]:
    """Half-line grids (0, q_max] and (0, s(q_max)] with the same node count."""
    z_max = evaluate(plan.substitution, q_max)
    return GridSpec(0.0, q_max, n), GridSpec(0.0, z_max, n)


@dataclass(frozen=True)
class ShiftComparison:
    q_levels: tuple[float, ...]
    z_levels: tuple[float, ...]
    shift: float

    @property
    def differences(self) -> tuple[float, ...]:
        """z-side level minus q-side level; the shift law expects ``shift``."""
        return tuple(z - q for q, z in zip(self.q_levels, self.z_levels))

    def to_json(self) -> dict:
        return {
            "shift": self.shift,
            "rows": [
                {"n": i, "q_side": q, "z_side": z, "difference": d, "relative_error": r}
                for i, (q, z, d, r) in enumerate(zip(self.q_levels, self.z_levels, self.differences, self.relative_errors))
            ],
        }

    @property
    def relative_errors(self) -> tuple[float, ...]:
        return tuple(abs(q - (z - self.shift)) / max(abs(z - self.shift), 1e-300) for q, z in zip(self.q_levels, self.z_levels))


def shift_comparison(
    plan: ReductionPlan, target: Potential, tho: THOParams, k: int = 3, q_max: float = 60.0, n: int = 6000
) -> ShiftComparison:
    gq, gz = matched_grids(plan, q_max, n)
    q_levels = fd_eigenvalues(target, gq, k)
    z_levels = fd_eigenvalues(tho_potential(tho), gz, k)
    return ShiftComparison(tuple(q_levels), tuple(z_levels), plan.energy_shift(tho.as_params()))


def tho_level(tho: THOParams, index: int, grid: GridSpec) -> float:
    return fd_eigenvalues(tho_potential(tho), grid, index + 1)[index]


def _with(tho: THOParams, name: str, value: float) -> THOParams:
    p = tho.as_params()
    p[name] = value
    return THOParams.from_params(p)


def zero_mode_parameter(tho: THOParams, name: str, index: int, grid: GridSpec, tol: float = 1e-10) -> float:
    """Value of ``name`` for which the index-th half-line THO level is zero.

    The level increases with each of rho, lambda and omega (for omega > 0),
    so the root is found by bracketing and bisection.
    """
    f = lambda x: tho_level(_with(tho, name, x), index, grid)  # noqa: E731
    if name == "omega":
        lo, hi = 1e-3, 1.0
        if f(lo) > 0:
            raise NoRealSolution(f"level {index} stays positive for every omega > 0")
    else:
        lo, hi = -1.0, 1.0
        while f(lo) > 0:
            lo *= 2
    while f(hi) < 0:
        hi *= 2
    while hi - lo > tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ZeroModeComparison:
    parameter: str
    q_levels: tuple[float, ...]
    values: tuple[float, ...]
    predicted: tuple[float, ...]

    @property
    def relative_errors(self) -> tuple[float, ...]:
        return tuple(abs(e - p) / abs(p) for e, p in zip(self.q_levels, self.predicted))

    def to_json(self) -> dict:
        return {
            "parameter": self.parameter,
            "rows": [
                {"n": i, "parameter_value": v, "predicted": p, "fd": e, "relative_error": r}
                for i, (v, p, e, r) in enumerate(zip(self.values, self.predicted, self.q_levels, self.relative_errors))
            ],
        }


def zero_mode_comparison(
    plan: ReductionPlan,
    target: Potential,
    tho: THOParams,
    k: int = 3,
    q_grid: GridSpec | None = None,
    z_grid: GridSpec | None = None,
) -> ZeroModeComparison:
    """Compare the q-side levels with -shift at the zero-mode parameter values."""
    name = plan.free_parameter
    if name is None:
        raise ValueError("the plan's energy shift has no free parameter")
    q_grid = q_grid or GridSpec(0.0, 60.0, 6000)
    z_grid = z_grid or GridSpec(0.0, 16.0, 3000)
    levels = fd_eigenvalues(target, q_grid, k)
    values = tuple(zero_mode_parameter(tho, name, i, z_grid) for i in range(k))
    predicted = tuple(0.0 - plan.energy_shift({**tho.as_params(), name: v}) for v in values)
    return ZeroModeComparison(name, tuple(levels), values, predicted)
