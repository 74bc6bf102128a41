"""Simulation of the short-clause (SC) unit-propagation heuristic.

Each round makes one free step (a variable set by the policy) followed by
unit propagation until no unit clauses remain. There is no backtracking: a
contradiction ends the run.

Clause states are tracked by the counts of true and false variables:

    (0, 0)  3-clause                (0, 1)  2-clause, XOR of the two unset
    (0, 2)  positive unit           (1, 0)  two negative units pending
    (1, 1)  one negative unit       (1, 2)  satisfied, retired

Anything with two trues or three falses is a contradiction.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .formula import Formula, evaluate
from .policy import Kind, Policy, PURE_KINDS, SHORT_CLAUSE

__all__ = ["Contradiction", "AlgState", "Outcome", "RunResult", "run", "free_step"]

UNSET = -1


class Contradiction(Exception):
    """Unit propagation reached an unsatisfiable clause or a clashing unit."""


class Outcome(enum.Enum):
    SATISFIED = "satisfied"
    CONTRADICTION = "contradiction"
    S2_EXHAUSTED = "s2-exhausted"


class _Pool:
    """Set of clause ids with O(1) insert, remove and uniform sampling."""

    __slots__ = ("items", "where")

    def __init__(self, m):
        self.items: list[int] = []
        self.where = [-1] * m

    def add(self, ci):
        self.where[ci] = len(self.items)
        self.items.append(ci)

    def remove(self, ci):
        i = self.where[ci]
        last = self.items.pop()
        if last != ci:
            self.items[i] = last
            self.where[last] = i
        self.where[ci] = -1

    def __len__(self):
        return len(self.items)

    def __contains__(self, ci):
        return self.where[ci] >= 0


class AlgState:
    """Mutable propagation state of one SC run."""

    def __init__(self, f: Formula):
        self.formula = f
        self.n = n = f.n
        m = f.m
        self.clauses = [tuple(v - 1 for v in c) for c in f.clauses]
        self.occ: list[list[int]] = [[] for _ in range(n)]
        for ci, c in enumerate(self.clauses):
            for v in c:
                self.occ[v].append(ci)
        self.val = [UNSET] * n
        self.ntrue = [0] * m
        self.nfalse = [0] * m
        self.three = _Pool(m)
        self.two = _Pool(m)
        for ci in range(m):
            self.three.add(ci)
        # unset variables, for uniform variable picks
        self.unset = list(range(n))
        self.unset_pos = list(range(n))
        self.neg_units: deque[int] = deque()
        self.pos_units: deque[int] = deque()
        self.X = 0
        self.T = 0

    @property
    def S3(self) -> int:
        return len(self.three)

    @property
    def S2(self) -> int:
        return len(self.two)

    def width(self, ci: int) -> int:
        """Number of unset variables still carrying an obligation in clause ``ci``."""
        t, k = self.ntrue[ci], self.nfalse[ci]
        if t == 1 and k == 2:
            return 0
        return 3 - t - k

    def is_retired(self, ci: int) -> bool:
        return self.ntrue[ci] == 1 and self.nfalse[ci] == 2

    def push_unit(self, v: int, value: bool):
        (self.pos_units if value else self.neg_units).append(v)

    def set_variable(self, v: int, value: bool):
        """Assign variable ``v`` (0-based) and update every clause it occurs in."""
        val = self.val
        if val[v] != UNSET:
            raise ValueError(f"variable {v + 1} is already set")
        val[v] = 1 if value else 0
        self.X += 1
        # drop v from the unset pool
        i = self.unset_pos[v]
        last = self.unset.pop()
        if last != v:
            self.unset[i] = last
            self.unset_pos[last] = i

        clauses, ntrue, nfalse = self.clauses, self.ntrue, self.nfalse
        if value:
            for ci in self.occ[v]:
                t = ntrue[ci]
                if t:
                    raise Contradiction(f"two true variables in clause {ci}")
                ntrue[ci] = 1
                k = nfalse[ci]
                if k == 0:
                    self.three.remove(ci)
                elif k == 1:
                    self.two.remove(ci)
                if k < 2:
                    for u in clauses[ci]:
                        if val[u] == UNSET:
                            self.neg_units.append(u)
        else:
            for ci in self.occ[v]:
                k = nfalse[ci] + 1
                nfalse[ci] = k
                if ntrue[ci]:
                    continue
                if k == 1:
                    self.three.remove(ci)
                    self.two.add(ci)
                elif k == 2:
                    self.two.remove(ci)
                    for u in clauses[ci]:
                        if val[u] == UNSET:
                            self.pos_units.append(u)
                else:
                    raise Contradiction(f"all variables false in clause {ci}")

    def propagate(self):
        """Satisfy queued units, negatives first, until both queues are empty."""
        neg, pos, val = self.neg_units, self.pos_units, self.val
        while neg or pos:
            if neg:
                u, want = neg.popleft(), 0
            else:
                u, want = pos.popleft(), 1
            cur = val[u]
            if cur == want:
                continue
            if cur != UNSET:
                raise Contradiction(f"variable {u + 1} forced both ways")
            self.set_variable(u, bool(want))

    def finish_unconstrained(self):
        """Set every remaining variable false; only valid once no clause is live."""
        for v in list(self.unset):
            self.set_variable(v, False)

    def assignment(self) -> np.ndarray:
        return np.array([x == 1 for x in self.val], dtype=bool)

    def residual_formula(self) -> tuple[Formula, list[int]]:
        """The live 3-clauses, renumbered onto the unset variables.

        Returns the formula and the list mapping new 1-based indices back to
        0-based original variables.
        """
        live = sorted(self.three.items)
        vars_ = sorted({u for ci in live for u in self.clauses[ci]} | set(self.unset))
        index = {u: i + 1 for i, u in enumerate(vars_)}
        clauses = tuple(tuple(index[u] for u in self.clauses[ci]) for ci in live)
        return Formula(len(vars_), clauses), vars_

    def point(self) -> tuple[float, float, float]:
        n = self.n
        return self.X / n, self.S2 / n, self.S3 / n


def _pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def free_step(st: AlgState, policy: Policy, rng) -> None:
    """One free assignment chosen by ``policy``. Queues must be empty."""
    if st.neg_units or st.pos_units:
        raise ValueError("free step with pending unit clauses")
    if not st.unset:
        raise ValueError("no unset variables")
    if not len(st.two) and not len(st.three):
        st.finish_unconstrained()
        return
    kind = policy.kind
    if kind is Kind.MIX:
        kind = PURE_KINDS[int(rng.choice(3, p=policy.mix_weights))]
    if kind is Kind.RANDOM_VARIABLE:
        st.set_variable(_pick(rng, st.unset), policy.free_value)
        return
    if kind is Kind.RANDOM_3CLAUSE and len(st.three):
        pool = st.three
    elif len(st.two):
        pool = st.two
    else:
        pool = st.three
    ci = _pick(rng, pool.items)
    choices = [u for u in st.clauses[ci] if st.val[u] == UNSET]
    st.set_variable(_pick(rng, choices), True)


@dataclass
class RunResult:
    outcome: Outcome
    witness: Optional[np.ndarray]
    trajectory: np.ndarray  # columns x, s2, s3
    rounds: int
    max_round_size: int
    round_sizes: np.ndarray = field(repr=False, default=None)
    residual: Optional[Formula] = field(repr=False, default=None)

    @property
    def satisfied(self) -> bool:
        return self.outcome is Outcome.SATISFIED


def run(
    f: Formula,
    policy: Policy = SHORT_CLAUSE,
    seed: int = 0,
    sample_stride: int = 1,
    stop_at_s2_extinction: bool = False,
    s2_onset: int | None = None,
) -> RunResult:
    """Run the heuristic on ``f`` until it satisfies the formula or fails.

    The trajectory holds ``(X/n, S2/n, S3/n)`` at the start, after every
    ``sample_stride``-th round, and at the terminal event.

    With ``stop_at_s2_extinction`` the run halts at the first round that ends
    with no 2-clauses after ``S2`` has reached ``s2_onset`` (default
    ``sqrt(n)``), and the live 3-clauses are returned as ``residual``.
    """
    if sample_stride < 1:
        raise ValueError("sample_stride must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    st = AlgState(f)
    n = max(f.n, 1)
    onset = max(1, int(math.isqrt(f.n))) if s2_onset is None else s2_onset
    samples = [(0.0, 0.0, f.m / n)]
    sizes: list[int] = []
    peak_s2 = 0
    outcome = None
    residual = None
    before = 0
    try:
        while st.unset:
            if not len(st.two) and not len(st.three):
                # nothing left to satisfy; not counted as a round
                st.finish_unconstrained()
                continue
            before = st.X
            free_step(st, policy, rng)
            st.propagate()
            st.T += 1
            sizes.append(st.X - before)
            if st.T % sample_stride == 0:
                samples.append(st.point())
            s2 = len(st.two)
            if s2 > peak_s2:
                peak_s2 = s2
            if stop_at_s2_extinction and s2 == 0 and peak_s2 >= onset:
                outcome = Outcome.S2_EXHAUSTED
                residual = st.residual_formula()[0]
                break
        else:
            outcome = Outcome.SATISFIED
    except Contradiction:
        outcome = Outcome.CONTRADICTION
        sizes.append(st.X - before)
        st.T += 1
    if samples[-1] != st.point():
        samples.append(st.point())

    witness = None
    if outcome is Outcome.SATISFIED:
        witness = st.assignment()
        if not evaluate(f, witness):
            raise AssertionError("SC reported success with an invalid assignment")
    sizes_arr = np.array(sizes, dtype=np.int64)
    return RunResult(
        outcome=outcome,
        witness=witness,
        trajectory=np.array(samples, dtype=float),
        rounds=st.T,
        max_round_size=int(sizes_arr.max()) if sizes else 0,
        round_sizes=sizes_arr,
        residual=residual,
    )
