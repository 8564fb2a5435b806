"""Potentials: an expression in ``q`` plus its domain and parameter values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from ..errors import DomainError, UnboundName
from .calculus import diff
from .evaluate import compile_array, compile_scalar, evaluate
from .expr import Expr, parameters
from .parser import parse


@dataclass(frozen=True)
class Domain:
    lower: float = -math.inf
    upper: float = math.inf
    lower_closed: bool = False
    upper_closed: bool = False

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"empty domain ({self.lower}, {self.upper})")
        if math.isinf(self.lower) and self.lower_closed:
            raise ValueError("infinite ends must be open")
        if math.isinf(self.upper) and self.upper_closed:
            raise ValueError("infinite ends must be open")

    @classmethod
    def real_line(cls) -> Domain:
        return cls()

    @classmethod
    def half_line(cls) -> Domain:
        return cls(0.0, math.inf)

    @classmethod
    def parse(cls, text: str) -> Domain:
        """Read ``"a,b"``; ``inf``/``-inf`` are accepted for open ends."""
        lo, hi = (float(part) for part in text.split(","))
        return cls(lo, hi)

    def contains(self, x: float) -> bool:
        above = x >= self.lower if self.lower_closed else x > self.lower
        below = x <= self.upper if self.upper_closed else x < self.upper
        return above and below

    def finite_window(self, extent: float = 10.0) -> tuple[float, float]:
        """Replace infinite ends by ``anchor -/+ extent``."""
        lo, hi = self.lower, self.upper
        if math.isinf(lo) and math.isinf(hi):
            return -extent, extent
        if math.isinf(lo):
            return hi - extent, hi
        if math.isinf(hi):
            return lo, lo + extent
        return lo, hi

    def to_json(self) -> list:
        return [_jsonable(self.lower), _jsonable(self.upper)]


def _jsonable(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class Potential:
    expr: Expr
    domain: Domain = field(default_factory=Domain)
    params: Mapping[str, float] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        missing = parameters(self.expr) - set(self.params)
        if missing:
            raise UnboundName(sorted(missing)[0])

    @classmethod
    def from_text(cls, text: str, domain: Domain | None = None, params=None, name: str = "") -> Potential:
        return cls(parse(text), domain or Domain(), dict(params or {}), name)

    @cached_property
    def d1(self) -> Expr:
        return diff(self.expr, "q")

    @cached_property
    def d2(self) -> Expr:
        return diff(self.d1, "q")

    def __call__(self, q: float) -> float:
        if not self.domain.contains(q):
            raise DomainError(f"q={q!r} outside the domain", self.expr, q)
        return evaluate(self.expr, q, self.params)

    def derivative(self, q: float, order: int = 1) -> float:
        e = {1: self.d1, 2: self.d2}[order]
        if not self.domain.contains(q):
            raise DomainError(f"q={q!r} outside the domain", e, q)
        return evaluate(e, q, self.params)

    @cached_property
    def fast_value(self):
        return compile_scalar(self.expr, self.params)

    @cached_property
    def fast_d1(self):
        return compile_scalar(self.d1, self.params)

    @cached_property
    def array_value(self):
        return compile_array(self.expr, self.params)

    @cached_property
    def array_d1(self):
        return compile_array(self.d1, self.params)

    @cached_property
    def array_d2(self):
        return compile_array(self.d2, self.params)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "expr": str(self.expr),
            "domain": self.domain.to_json(),
            "params": dict(sorted(self.params.items())),
        }
