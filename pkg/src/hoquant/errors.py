"""Exception types shared across the package."""

from __future__ import annotations


class HoquantError(Exception):
    """Base class for every error raised by this package."""


class ExprSyntaxError(HoquantError, ValueError):
    """Potential text does not match the expression grammar."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class UnknownFunction(ExprSyntaxError):
    pass


class DomainError(HoquantError, ArithmeticError):
    """An expression was evaluated where it is undefined."""

    def __init__(self, message: str, node=None, point=None):
        self.node = node
        self.point = point
        super().__init__(message)


class UnboundName(HoquantError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"parameter {self.name!r} is not bound"


class NotPowerSum(HoquantError, ValueError):
    """Expression is not a finite sum of rational power monomials."""


class GridError(HoquantError, ValueError):
    pass


class DegenerateCritical(HoquantError, ValueError):
    pass


class NotEquilibrium(HoquantError, ValueError):
    pass


class BlowUp(HoquantError):
    """Trajectory escaped (norm over threshold or potential unevaluable)."""

    def __init__(self, t_star: float, state, reason: str, trajectory=None):
        self.t_star = t_star
        self.state = state
        self.reason = reason
        self.trajectory = trajectory
        super().__init__(f"blow-up at t*={t_star:.6g}: {reason}")


class AiryCase(HoquantError, ValueError):
    """omega = 0: the translated oscillator degenerates to the Airy equation."""


class NonSchrodingerForm(HoquantError, ValueError):
    def __init__(self, max_c1: float):
        self.max_c1 = max_c1
        super().__init__(
            f"conjugated operator keeps a first-order term (max |c1| = {max_c1:.3e})"
        )


class NoRealSolution(HoquantError, ValueError):
    pass


class ToleranceTooSmall(HoquantError, ValueError):
    pass
