"""Expression language for potentials: parse, evaluate, differentiate, substitute."""

from .calculus import bind, diff, nth_diff, substitute
from .evaluate import compile_array, compile_scalar, evaluate, evaluate_grid
from .expr import (
    Add,
    Apply,
    Constant,
    Div,
    Expr,
    Mul,
    Neg,
    Parameter,
    Pow,
    Sub,
    Variable,
    const,
    parameters,
    variables,
)
from .parser import parse
from .potential import Domain, Potential
from .powersum import coefficient, power_sum
from .printer import to_text

__all__ = [
    "Add",
    "Apply",
    "Constant",
    "Div",
    "Domain",
    "Expr",
    "Mul",
    "Neg",
    "Parameter",
    "Potential",
    "Pow",
    "Sub",
    "Variable",
    "bind",
    "coefficient",
    "compile_array",
    "compile_scalar",
    "const",
    "diff",
    "evaluate",
    "evaluate_grid",
    "nth_diff",
    "parameters",
    "parse",
    "power_sum",
    "substitute",
    "to_text",
    "variables",
]
