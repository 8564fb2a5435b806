from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [a, b] with ``n`` interior nodes ``a + i*h``, i = 1..n.

    The end points themselves are never nodes, so a pole at ``a`` or ``b`` is
    not evaluated.
    """

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a < self.b:
            raise GridError(f"grid needs a < b, got [{self.a}, {self.b}]")
        if self.n < 3:
            raise GridError(f"grid needs at least 3 interior nodes, got {self.n}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.n + 1)

    def refined(self) -> GridSpec:
        """Same interval, half the spacing."""
        return GridSpec(self.a, self.b, 2 * self.n + 1)

    @classmethod
    def closed(cls, a: float, b: float, points: int) -> GridSpec:
        """Grid whose ``points`` nodes include both end points."""
        return cls(a - (b - a) / (points - 1), b + (b - a) / (points - 1), points)
