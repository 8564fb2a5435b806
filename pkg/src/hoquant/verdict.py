from __future__ import annotations

from enum import Enum


class Verdict(str, Enum):
    """Three-valued truth with Kleene connectives."""

    TRUE = "true"
    FALSE = "false"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def of(cls, flag: bool) -> Verdict:
        return cls.TRUE if flag else cls.FALSE

    def __and__(self, other: Verdict) -> Verdict:
        if Verdict.FALSE in (self, other):
            return Verdict.FALSE
        if Verdict.INCONCLUSIVE in (self, other):
            return Verdict.INCONCLUSIVE
        return Verdict.TRUE

    def __or__(self, other: Verdict) -> Verdict:
        if Verdict.TRUE in (self, other):
            return Verdict.TRUE
        if Verdict.INCONCLUSIVE in (self, other):
            return Verdict.INCONCLUSIVE
        return Verdict.FALSE
