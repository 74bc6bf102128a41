"""EC3 formulas: positive clauses over three variables, satisfied by exactly one true.

Variables are 1-based everywhere in the public API. An assignment is any
length-``n`` sequence of booleans where entry ``i`` holds variable ``i + 1``.

Random instances draw ``m = round(r * n)`` clauses independently and uniformly
from the ``C(n, 3)`` distinct-variable triples, with replacement. The generator
is numpy's PCG64 seeded directly with the caller's integer seed, so
``(n, r, seed)`` reproduces the same formula on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Formula",
    "FormatError",
    "canonical_clause",
    "clause_count",
    "generate_random",
    "evaluate",
    "to_cnf",
    "to_dimacs",
    "serialize",
    "parse",
]


class FormatError(ValueError):
    """Raised by :func:`parse` on malformed native-format text."""


def canonical_clause(vars: Iterable[int]) -> tuple[int, int, int]:
    c = tuple(sorted(int(v) for v in vars))
    if len(c) != 3:
        raise ValueError(f"clause must have exactly 3 variables, got {len(c)}")
    if c[0] == c[1] or c[1] == c[2]:
        raise ValueError(f"repeated variable in clause {c}")
    return c


@dataclass(frozen=True)
class Formula:
    """An EC3 instance on variables ``1..n``.

    ``clauses`` is kept in insertion order and may contain duplicates.
    ``provenance`` records ``(seed, r)`` for generated formulas; it is carried
    through serialization but ignored by equality.
    """

    n: int
    clauses: tuple[tuple[int, int, int], ...] = ()
    provenance: tuple[int, Fraction] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        clauses = tuple(canonical_clause(c) for c in self.clauses)
        for c in clauses:
            if c[0] < 1 or c[2] > self.n:
                raise ValueError(f"clause {c} references a variable outside [1, {self.n}]")
        object.__setattr__(self, "clauses", clauses)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def density(self) -> float:
        return self.m / self.n if self.n else 0.0

    @cached_property
    def array(self) -> np.ndarray:
        """Clauses as an ``(m, 3)`` int array of 0-based variable indices."""
        a = np.array(self.clauses, dtype=np.int64).reshape(-1, 3)
        return a - 1

    def occurrences(self) -> np.ndarray:
        """Number of clauses each variable appears in (0-based index)."""
        return np.bincount(self.array.ravel(), minlength=self.n)


def _as_fraction(r) -> Fraction:
    if isinstance(r, (Fraction, Rational, int)):
        return Fraction(r)
    if isinstance(r, str):
        return Fraction(r)
    r = float(r)
    if not np.isfinite(r):
        raise ValueError(f"density must be finite, got {r}")
    return Fraction(r)


def clause_count(n: int, r) -> int:
    """``round(r * n)`` with ties to even, computed exactly."""
    return round(_as_fraction(r) * n)


def generate_random(n: int, r, seed: int) -> Formula:
    """Random EC3 formula with ``round(r * n)`` uniform clauses.

    Triples are sampled as three uniform indices; rows with a repeated index
    are redrawn. ``r`` may be a float, a :class:`~fractions.Fraction` or a
    decimal string.
    """
    if n < 3:
        raise ValueError(f"need n >= 3 to form a clause, got n={n}")
    rf = _as_fraction(r)
    if rf < 0:
        raise ValueError(f"density must be non-negative, got {r}")
    if seed < 0:
        raise ValueError("seed must be a non-negative 64-bit integer")
    m = round(rf * n)
    rng = np.random.Generator(np.random.PCG64(seed))
    out = rng.integers(0, n, size=(m, 3))
    bad = _collisions(out)
    while bad.any():
        out[bad] = rng.integers(0, n, size=(int(bad.sum()), 3))
        bad = _collisions(out)
    out.sort(axis=1)
    out += 1
    clauses = tuple(map(tuple, out.tolist()))
    return Formula(n, clauses, provenance=(seed, rf))


def _collisions(rows: np.ndarray) -> np.ndarray:
    return (rows[:, 0] == rows[:, 1]) | (rows[:, 0] == rows[:, 2]) | (rows[:, 1] == rows[:, 2])


def evaluate(f: Formula, assignment: Sequence[bool]) -> bool:
    """True iff every clause has exactly one true variable."""
    a = np.asarray(assignment, dtype=bool)
    if a.shape != (f.n,):
        raise ValueError(f"assignment must have length {f.n}")
    if f.m == 0:
        return True
    return bool((a[f.array].sum(axis=1) == 1).all())


def to_cnf(f: Formula) -> list[tuple[int, ...]]:
    """Encode as CNF: one at-least-one clause and three pairwise at-most-one clauses."""
    cnf: list[tuple[int, ...]] = []
    for a, b, c in f.clauses:
        cnf += [(a, b, c), (-a, -b), (-a, -c), (-b, -c)]
    return cnf


def to_dimacs(f: Formula) -> str:
    cnf = to_cnf(f)
    lines = [f"p cnf {f.n} {len(cnf)}"]
    lines += [" ".join(map(str, cl)) + " 0" for cl in cnf]
    return "\n".join(lines) + "\n"


def serialize(f: Formula) -> str:
    """Native text format: ``p ec3 <n> <m>`` then one clause per line."""
    lines = []
    if f.provenance is not None:
        seed, r = f.provenance
        lines.append(f"c seed {seed} r {r}")
    lines.append(f"p ec3 {f.n} {f.m}")
    lines += [f"{a} {b} {c}" for a, b, c in f.clauses]
    return "\n".join(lines) + "\n"


def parse(text: str) -> Formula:
    lines = text.splitlines()
    i = 0
    provenance = None
    while i < len(lines) and (lines[i].startswith("c") or not lines[i].strip()):
        parts = lines[i].split()
        if len(parts) == 5 and parts[1] == "seed" and parts[3] == "r":
            provenance = (int(parts[2]), Fraction(parts[4]))
        i += 1
    if i == len(lines):
        raise FormatError("missing header line 'p ec3 <n> <m>'")
    head = lines[i].split()
    if len(head) != 4 or head[:2] != ["p", "ec3"]:
        raise FormatError(f"malformed header: {lines[i]!r}")
    try:
        n, m = int(head[2]), int(head[3])
    except ValueError:
        raise FormatError(f"malformed header: {lines[i]!r}") from None
    if n < 0 or m < 0:
        raise FormatError(f"malformed header: {lines[i]!r}")

    body = [ln for ln in lines[i + 1:] if ln.strip()]
    if len(body) != m:
        raise FormatError(f"clause count mismatch: header declares {m}, found {len(body)}")
    clauses = []
    for lineno, ln in enumerate(body, start=i + 2):
        parts = ln.split()
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 3 variables, got {len(parts)}")
        try:
            c = [int(p) for p in parts]
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer variable index") from None
        if any(v < 1 or v > n for v in c):
            raise FormatError(f"line {lineno}: variable index out of range [1, {n}]")
        if len(set(c)) != 3:
            raise FormatError(f"line {lineno}: repeated variable in clause")
        clauses.append(c)
    return Formula(n, tuple(clauses), provenance=provenance)
