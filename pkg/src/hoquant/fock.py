"""Truncated Bargmann-Fock algebra on polynomials F(z) = sum c_n z^n.

Conventions (fixed so both quoted spectra hold at once):

* ``raise_``  multiplies by z              (c_n -> index n+1)
* ``lower``   differentiates, d/dz         (n c_n -> index n-1)
* ``number``  is diag(2n)
* ``hamiltonian`` is (number + 1)/2, i.e. diag(n + 1/2)

Everything is exact: coefficients are :class:`fractions.Fraction` and operators
are band matrices keyed by diagonal offset (row - column).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class FockVector:
    coeffs: tuple[Fraction, ...]
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @classmethod
    def basis(cls, n: int, dim: int) -> FockVector:
        """The monomial z^n in a d-dimensional truncation."""
        c = [Fraction(0)] * dim
        c[n] = Fraction(1)
        return cls(tuple(c))

    def scaled(self, factor) -> FockVector:
        return FockVector(tuple(Fraction(factor) * c for c in self.coeffs), self.truncated)

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class FockOperator:
    """Band matrix: ``bands[k][i]`` is entry (row i + max(k,0), col i - min(k,0))."""

    dim: int
    bands: dict[int, tuple[Fraction, ...]]

    @classmethod
    def from_entries(cls, dim: int, entries: dict[tuple[int, int], Fraction]) -> FockOperator:
        bands: dict[int, list[Fraction]] = {}
        for (r, c), v in entries.items():
            if v == 0:
                continue
            k = r - c
            band = bands.setdefault(k, [Fraction(0)] * (dim - abs(k)))
            band[min(r, c)] = Fraction(v)
        return cls(dim, {k: tuple(b) for k, b in sorted(bands.items())})

    def entries(self) -> dict[tuple[int, int], Fraction]:
        out = {}
        for k, band in self.bands.items():
            for i, v in enumerate(band):
                if v:
                    r, c = (i + k, i) if k >= 0 else (i, i - k)
                    out[(r, c)] = v
        return out

    def __call__(self, v: FockVector) -> FockVector:
        out = [Fraction(0)] * self.dim
        for (r, c), a in self.entries().items():
            out[r] += a * v.coeffs[c]
        return FockVector(tuple(out))

    def __matmul__(self, other: FockOperator) -> FockOperator:
        acc: dict[tuple[int, int], Fraction] = {}
        right = other.entries()
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), v in right.items():
            by_row.setdefault(r, []).append((c, v))
        for (i, j), a in self.entries().items():
            for k, b in by_row.get(j, ()):
                acc[(i, k)] = acc.get((i, k), Fraction(0)) + a * b
        return FockOperator.from_entries(self.dim, acc)

    def __sub__(self, other: FockOperator) -> FockOperator:
        acc = dict(self.entries())
        for key, v in other.entries().items():
            acc[key] = acc.get(key, Fraction(0)) - v
        return FockOperator.from_entries(self.dim, acc)

    def __add__(self, other: FockOperator) -> FockOperator:
        acc = dict(self.entries())
        for key, v in other.entries().items():
            acc[key] = acc.get(key, Fraction(0)) + v
        return FockOperator.from_entries(self.dim, acc)

    def scaled(self, factor) -> FockOperator:
        f = Fraction(factor)
        return FockOperator.from_entries(self.dim, {k: f * v for k, v in self.entries().items()})

    def diagonal(self) -> tuple[Fraction, ...]:
        return self.bands.get(0, (Fraction(0),) * self.dim)

    def is_diagonal(self) -> bool:
        return all(k == 0 for k in self.bands)

    def __eq__(self, other):
        return isinstance(other, FockOperator) and self.dim == other.dim and self.entries() == other.entries()


def raise_matrix(dim: int) -> FockOperator:
    return FockOperator.from_entries(dim, {(n + 1, n): Fraction(1) for n in range(dim - 1)})


def lower_matrix(dim: int) -> FockOperator:
    return FockOperator.from_entries(dim, {(n - 1, n): Fraction(n) for n in range(1, dim)})


def identity_matrix(dim: int) -> FockOperator:
    return FockOperator.from_entries(dim, {(n, n): Fraction(1) for n in range(dim)})


def number_matrix(dim: int) -> FockOperator:
    return FockOperator.from_entries(dim, {(n, n): Fraction(2 * n) for n in range(dim)})


def hamiltonian_matrix(dim: int) -> FockOperator:
    return (number_matrix(dim) + identity_matrix(dim)).scaled(Fraction(1, 2))


def raise_(v: FockVector) -> FockVector:
    """Multiply F by z; the top coefficient falls off and sets ``truncated``."""
    lost = v.coeffs[-1] != 0
    return FockVector((Fraction(0),) + v.coeffs[:-1], truncated=lost)


def lower(v: FockVector) -> FockVector:
    """dF/dz."""
    c = v.coeffs
    return FockVector(tuple(n * c[n] for n in range(1, len(c))) + (Fraction(0),))


def number(v: FockVector) -> FockVector:
    return FockVector(tuple(2 * n * c for n, c in enumerate(v.coeffs)))


def hamiltonian(v: FockVector) -> FockVector:
    return FockVector(tuple((n + Fraction(1, 2)) * c for n, c in enumerate(v.coeffs)))


@dataclass(frozen=True)
class CommutatorReport:
    dim: int
    diagonal: tuple[Fraction, ...]
    identity_indices: tuple[int, ...]
    anomalies: dict[int, Fraction]
    off_diagonal_zero: bool

    @property
    def degenerate(self) -> bool:
        """d = 1 leaves no interior index to check."""
        return self.dim < 2

    @property
    def holds_on_interior(self) -> bool:
        return self.identity_indices == tuple(range(self.dim - 1)) and self.off_diagonal_zero

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "diagonal": [fraction_text(x) for x in self.diagonal],
            "identity_indices": list(self.identity_indices),
            "anomalies": {str(k): fraction_text(v) for k, v in self.anomalies.items()},
            "holds_on_interior": self.holds_on_interior,
            "degenerate": self.degenerate,
        }


def commutator_check(dim: int) -> CommutatorReport:
    """[lower, raise] = lower.raise - raise.lower, exactly.

    Equals the identity on indices 0..d-2; the truncation puts -(d-1) at the
    last index instead of 1.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    r, l = raise_matrix(dim), lower_matrix(dim)
    comm = (l @ r) - (r @ l)
    diag = comm.diagonal()
    ok = tuple(i for i, v in enumerate(diag[: dim - 1]) if v == 1)
    anomalies = {i: v for i, v in enumerate(diag) if v != 1 or i == dim - 1}
    return CommutatorReport(dim, diag, ok, anomalies, comm.is_diagonal())


def spectrum(dim: int) -> list[Fraction]:
    """Eigenvalues n + 1/2 of the Hamiltonian, read off its diagonal matrix."""
    h = hamiltonian_matrix(dim)
    if not h.is_diagonal():
        raise AssertionError("Hamiltonian matrix must be diagonal in the monomial basis")
    return list(h.diagonal())


def fraction_text(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def as_floats(values: Sequence[Fraction]) -> list[float]:
    return [float(v) for v in values]
