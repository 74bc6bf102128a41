"""Two-type branching process of the forced steps.

The two types are positive and negative unit clauses. At a point with a
fraction ``x`` of variables set and scaled clause densities ``s2``, ``s3``:

* resolving a positive unit (setting a variable true) spawns on average
  ``a = (6 s3 + 2 s2) / (1 - x)`` negative units;
* resolving a negative unit spawns on average ``b = 2 s2 / (1 - x)``
  positive units.

Starting from ``p0 = (positives, negatives)`` the expected totals solve
``m_T = p + b m_F`` and ``m_F = q + a m_T``, i.e.
``m_T = (p + b q) / (1 - ab)`` and ``m_F = (q + a p) / (1 - ab)``.
The offspring matrix is anti-diagonal, so its spectral radius is
``sqrt(ab) = 2 / (1 - x) * sqrt(s2 (s2 + 3 s3))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BranchPoint",
    "TransitionMatrix",
    "BranchStats",
    "Supercritical",
    "transition_matrix",
    "lambda1",
    "expected_sets",
    "SC_P0",
]

# One free true-set plus the forced false on its 2-clause partner.
SC_P0 = (1.0, 1.0)


class Supercritical(ArithmeticError):
    """The branching process is not subcritical (``lambda1 >= 1``)."""

    def __init__(self, lam: float):
        super().__init__(f"branching process is supercritical (lambda1 = {lam:.6g})")
        self.lambda1 = lam


@dataclass(frozen=True)
class BranchPoint:
    x: float
    s2: float
    s3: float

    def __post_init__(self):
        if not self.x < 1:
            raise ValueError(f"x must be < 1, got {self.x}")
        for name in ("s2", "s3"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class TransitionMatrix:
    a: float  # negatives per positive
    b: float  # positives per negative

    def as_array(self) -> np.ndarray:
        """Offspring matrix acting on (positive, negative) column vectors."""
        return np.array([[0.0, self.b], [self.a, 0.0]])


@dataclass(frozen=True)
class BranchStats:
    m_T: float
    m_F: float
    lambda1: float

    @property
    def total(self) -> float:
        return self.m_T + self.m_F


def _rates(x: float, s2: float, s3: float) -> tuple[float, float]:
    if not x < 1:
        raise ValueError(f"x must be < 1, got {x}")
    w = 1.0 - x
    return (6.0 * s3 + 2.0 * s2) / w, 2.0 * s2 / w


def transition_matrix(p: BranchPoint) -> TransitionMatrix:
    a, b = _rates(p.x, p.s2, p.s3)
    return TransitionMatrix(a, b)


def lambda1(p: BranchPoint) -> float:
    if not p.x < 1:
        raise ValueError(f"x must be < 1, got {p.x}")
    return 2.0 / (1.0 - p.x) * math.sqrt(p.s2 * (p.s2 + 3.0 * p.s3))


def expected_sets(p: BranchPoint, p0: tuple[float, float] = SC_P0, swap: bool = False) -> BranchStats:
    """Expected variables set true and false in one round.

    ``p0`` is the initial (positive, negative) unit population; the default
    is the short-clause free step. ``swap=True`` exchanges ``m_T`` and
    ``m_F``, which is what reading the printed matrix with the opposite
    component order would give.
    """
    a, b = _rates(p.x, p.s2, p.s3)
    lam = math.sqrt(a * b)
    if lam >= 1.0:
        raise Supercritical(lam)
    d = 1.0 - a * b
    pos, neg = p0
    m_T = (pos + b * neg) / d
    m_F = (neg + a * pos) / d
    if swap:
        m_T, m_F = m_F, m_T
    return BranchStats(m_T, m_F, lam)
