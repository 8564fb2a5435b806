"""Finite-difference eigenvalues of -k d^2/dq^2 + V(q) with Dirichlet ends.

The operator is discretised with the three-point Laplacian on a
:class:`~hoquant.grid.GridSpec`; eigenvalues of the resulting symmetric
tridiagonal matrix are found by Sturm-sequence counting and bisection.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np

from .dsl import Potential
from .errors import DomainError, ToleranceTooSmall
from .grid import GridSpec

EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class Tridiag:
    diag: tuple[float, ...]
    off: tuple[float, ...]

    def __post_init__(self):
        if len(self.off) != len(self.diag) - 1:
            raise ValueError("off-diagonal must have n-1 entries")

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def scale(self) -> float:
        """Infinity-norm bound used for tolerance checks."""
        big_off = max((abs(b) for b in self.off), default=0.0)
        return max(abs(a) for a in self.diag) + 2 * big_off

    def gershgorin(self) -> tuple[float, float]:
        lo, hi = math.inf, -math.inf
        n = self.n
        for i, a in enumerate(self.diag):
            r = (abs(self.off[i - 1]) if i > 0 else 0.0) + (abs(self.off[i]) if i < n - 1 else 0.0)
            lo = min(lo, a - r)
            hi = max(hi, a + r)
        return lo, hi

    def dense(self) -> np.ndarray:
        m = np.diag(np.asarray(self.diag, dtype=float))
        if self.n > 1:
            off = np.asarray(self.off, dtype=float)
            m += np.diag(off, 1) + np.diag(off, -1)
        return m

    @cached_property
    def off_squares(self) -> list[float]:
        return [b * b for b in self.off]

    def leading(self, m: int) -> Tridiag:
        """Leading m x m principal submatrix."""
        return Tridiag(self.diag[:m], self.off[: m - 1])


PotentialLike = Union[Potential, Callable[[np.ndarray], np.ndarray]]


def _values(V: PotentialLike, nodes: np.ndarray) -> np.ndarray:
    if isinstance(V, Potential):
        inside = [V.domain.contains(x) for x in nodes]
        if not all(inside):
            i = inside.index(False)
            raise DomainError(f"grid node {i} (q={nodes[i]!r}) lies outside the domain", V.expr, nodes[i])
        vals = V.array_value(nodes)
    else:
        vals = np.asarray(V(nodes), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.argmax(bad))
        raise DomainError(f"potential not finite at grid node {i} (q={nodes[i]!r})", None, nodes[i])
    return vals


def discretize(V: PotentialLike, g: GridSpec, kinetic: float = 1.0) -> Tridiag:
    """Three-point stencil: diag = 2k/h^2 + V(q_i), off = -k/h^2."""
    h2 = g.h * g.h
    vals = _values(V, g.nodes)
    diag = tuple(float(2.0 * kinetic / h2 + v) for v in vals)
    off = (-kinetic / h2,) * (g.n - 1)
    return Tridiag(diag, off)


def sturm_count(t: Tridiag, x: float) -> int:
    """Number of eigenvalues strictly below ``x``."""
    diag = t.diag
    off2 = t.off_squares
    pivmin = sys.float_info.min * max(1.0, max(off2, default=1.0))
    d = diag[0] - x
    if abs(d) < pivmin:
        d = -pivmin
    count = 1 if d < 0 else 0
    for i in range(1, len(diag)):
        d = diag[i] - x - off2[i - 1] / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0:
            count += 1
    return count


def minimum_tolerance(t: Tridiag) -> float:
    return 1e3 * EPS * t.scale


def eigenvalue_brackets(t: Tridiag, k: int, tol: float | None = None) -> list[tuple[float, float]]:
    """Brackets [lo, hi] of width <= tol around the k smallest eigenvalues."""
    if not 1 <= k <= t.n:
        raise ValueError(f"need 1 <= k <= {t.n}, got {k}")
    floor = minimum_tolerance(t)
    if tol is None:
        tol = 10 * floor
    if tol < floor:
        raise ToleranceTooSmall(f"tol={tol:.3e} is below 1e3*eps*scale = {floor:.3e}")
    lo0, hi0 = t.gershgorin()
    pad = max(tol, EPS * max(abs(lo0), abs(hi0), 1.0))
    lo0, hi0 = lo0 - pad, hi0 + pad
    # every probe (x, count below x) seen so far; lets later indices start tight
    probes: list[tuple[float, int]] = [(lo0, 0), (hi0, t.n)]
    out = []
    for j in range(k):
        lo = max(x for x, c in probes if c <= j)
        hi = min(x for x, c in probes if c > j)
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            c = sturm_count(t, mid)
            probes.append((mid, c))
            if c > j:
                hi = mid
            else:
                lo = mid
        out.append((lo, hi))
    return out


def lowest_eigenvalues(t: Tridiag, k: int, tol: float | None = None) -> list[float]:
    """The k smallest eigenvalues in ascending order, each to within tol."""
    return [0.5 * (lo + hi) for lo, hi in eigenvalue_brackets(t, k, tol)]


def fd_eigenvalues(V: PotentialLike, g: GridSpec, k: int, kinetic: float = 1.0, tol: float | None = None) -> list[float]:
    return lowest_eigenvalues(discretize(V, g, kinetic), k, tol)


def richardson_refine(
    V: PotentialLike, g: GridSpec, k: int, kinetic: float = 1.0, tol: float | None = None
) -> list[float]:
    """Eliminate the O(h^2) error: E ~ (4 E(h/2) - E(h)) / 3."""
    coarse = fd_eigenvalues(V, g, k, kinetic, tol)
    fine = fd_eigenvalues(V, g.refined(), k, kinetic, tol)
    return [(4.0 * f - c) / 3.0 for c, f in zip(coarse, fine)]


def eigenvalue_rows(t: Tridiag, k: int, tol: float | None = None) -> list[dict]:
    """Rows for JSON/CSV output: index, value, bracket width."""
    return [
        {"index": i, "value": 0.5 * (lo + hi), "bracket_width": hi - lo}
        for i, (lo, hi) in enumerate(eigenvalue_brackets(t, k, tol))
    ]


def interlaces(outer: Sequence[float], inner: Sequence[float], slack: float = 0.0) -> bool:
    """Cauchy interlacing of the (m-1) x (m-1) spectrum within the m x m one."""
    return all(outer[i] - slack <= inner[i] <= outer[i + 1] + slack for i in range(len(inner)))
