"""Named potentials used throughout the examples and the acceptance checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .dsl import Domain, Potential
from .reduction import PGParams, pg_potential


@dataclass(frozen=True)
class Builtin:
    text: str
    domain: Domain
    defaults: dict[str, float]
    # published claims about the potential, compared against the analyzer output
    claims: dict[str, str] = field(default_factory=dict)
    note: str = ""


BUILTINS: dict[str, Builtin] = {
    "ho": Builtin("omega^2*q^2", Domain(), {"omega": 1.0}, {"ho_integrable": "true"}),
    "example1": Builtin(
        "omega^2*(3*q/2)^(2/3) + lambda*(2/(3*q))^(2/3) - (5/36)/q^2",
        Domain.half_line(),
        {"omega": 1.0, "lambda": 1.0},
        {"bounded_below": "true", "proper": "true"},
        "reduces to the THO with U = z^(1/4), z = (3q/2)^(2/3); energy shift +rho",
    ),
    "example2": Builtin(
        "rho/(2*q)^(1/2) + lambda/(2*q) - (3/16)/q^2",
        Domain.half_line(),
        {"rho": 1.0, "lambda": 1.0},
        note="reduces to the THO with U = z^(1/2), z = (2q)^(1/2); energy shift +omega^2",
    ),
}

PSEUDO_GAUSSIAN_DEFAULTS = {"lambda": 1, "mu": 1, "s": 2}
NAMES = sorted([*BUILTINS, "pseudo-gaussian"])


def builtin(name: str, params: Mapping[str, float] | None = None) -> Potential:
    params = dict(params or {})
    if name == "pseudo-gaussian":
        p = {**PSEUDO_GAUSSIAN_DEFAULTS, **params}
        return pg_potential(PGParams(Fraction(str(p["lambda"])), Fraction(str(p["mu"])), int(p["s"])))
    b = BUILTINS[name]
    return Potential.from_text(b.text, b.domain, {**b.defaults, **params}, name)


def claims(name: str) -> dict[str, str]:
    if name == "pseudo-gaussian":
        return {"proper": "false"}
    return dict(BUILTINS[name].claims) if name in BUILTINS else {}


def resolve(source: str, params: Mapping[str, float] | None = None, domain: Domain | None = None) -> Potential:
    """A built-in name, ``@file`` holding an expression, or inline expression text."""
    if source in NAMES:
        V = builtin(source, params)
        if domain is not None:
            V = Potential(V.expr, domain, V.params, V.name)
        return V
    if source.startswith("@"):
        source = Path(source[1:]).read_text().strip()
    return Potential.from_text(source, domain, params, "")
