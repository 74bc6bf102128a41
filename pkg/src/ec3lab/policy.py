"""Free-step policies shared by the simulator and the differential equations."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = ["Kind", "Policy", "SHORT_CLAUSE", "RANDOM_VARIABLE", "RANDOM_3CLAUSE"]


class Kind(enum.Enum):
    SHORT_CLAUSE = "sc"
    RANDOM_VARIABLE = "rv"
    RANDOM_3CLAUSE = "r3"
    MIX = "mix"


PURE_KINDS = (Kind.SHORT_CLAUSE, Kind.RANDOM_VARIABLE, Kind.RANDOM_3CLAUSE)

_ALIASES = {
    "sc": Kind.SHORT_CLAUSE,
    "short-clause": Kind.SHORT_CLAUSE,
    "rv": Kind.RANDOM_VARIABLE,
    "random-variable": Kind.RANDOM_VARIABLE,
    "r3": Kind.RANDOM_3CLAUSE,
    "random-3clause": Kind.RANDOM_3CLAUSE,
}


@dataclass(frozen=True)
class Policy:
    """How the free step picks its variable.

    ``mix_weights`` are the probabilities of (short-clause, random-variable,
    random-3-clause) and are only used by ``Kind.MIX``. ``free_value`` is the
    value given to the free variable by ``RANDOM_VARIABLE``; every other kind
    always sets it true.
    """

    kind: Kind
    mix_weights: tuple[float, float, float] | None = None
    free_value: bool = True

    def __post_init__(self):
        if self.kind is Kind.MIX:
            w = self.mix_weights
            if w is None or len(w) != 3 or any(not math.isfinite(x) or x < 0 for x in w):
                raise ValueError("mix policy needs three non-negative weights")
            if abs(sum(w) - 1.0) > 1e-12:
                raise ValueError(f"mix weights must sum to 1, got {sum(w)!r}")
        elif self.mix_weights is not None:
            raise ValueError("mix_weights only apply to Kind.MIX")
        if not self.free_value and self.kind is not Kind.RANDOM_VARIABLE:
            raise ValueError("free_value=False is only defined for the random-variable policy")

    @classmethod
    def parse(cls, text: str) -> "Policy":
        """Parse ``sc``, ``rv``, ``rv-false``, ``r3`` or ``mix:w_sc,w_rv,w_r3``."""
        t = text.strip().lower()
        if t.startswith("mix:"):
            parts = t[4:].split(",")
            if len(parts) != 3:
                raise ValueError(f"mix policy needs three weights: {text!r}")
            w = tuple(float(p) for p in parts)
            total = sum(w)
            if total <= 0:
                raise ValueError(f"mix weights must have a positive sum: {text!r}")
            return cls(Kind.MIX, tuple(x / total for x in w))
        if t in ("rv-false", "random-variable-false"):
            return cls(Kind.RANDOM_VARIABLE, free_value=False)
        try:
            return cls(_ALIASES[t])
        except KeyError:
            raise ValueError(f"unknown policy {text!r}") from None

    def __str__(self):
        if self.kind is Kind.MIX:
            return "mix:" + ",".join(f"{w:g}" for w in self.mix_weights)
        if not self.free_value:
            return "rv-false"
        return self.kind.value


SHORT_CLAUSE = Policy(Kind.SHORT_CLAUSE)
RANDOM_VARIABLE = Policy(Kind.RANDOM_VARIABLE)
RANDOM_3CLAUSE = Policy(Kind.RANDOM_3CLAUSE)
