"""Complete EC3 decision procedure and a brute-force oracle.

The search is plain chronological backtracking over a trail. After every
assignment each clause keeps a count of its true and false variables, which
is all the exactly-one propagation needs:

* one true  -> the clause's other unset variables are forced false
* two false and no true -> the last variable is forced true
* two true, or three false -> conflict
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .formula import Formula, evaluate

__all__ = ["SolveResult", "BudgetExceeded", "solve", "brute_force", "BRUTE_FORCE_MAX_N"]

BRUTE_FORCE_MAX_N = 25


@dataclass
class SolveResult:
    sat: bool
    witness: Optional[np.ndarray] = None
    nodes: int = 0
    propagations: int = 0
    seconds: float = 0.0
    solutions: Optional[int] = None  # brute force only

    @property
    def verdict(self) -> str:
        return "SAT" if self.sat else "UNSAT"


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int, budget: int):
        super().__init__(f"node budget {budget} exceeded")
        self.nodes = nodes
        self.budget = budget


def solve(f: Formula, node_budget: int | None = None) -> SolveResult:
    """Decide satisfiability of ``f``.

    Branches on the lowest unset variable of the first shortest live clause,
    true before false. ``nodes`` counts branch points; if it would exceed
    ``node_budget`` a :class:`BudgetExceeded` is raised.
    """
    t0 = time.perf_counter()
    n, m = f.n, f.m
    clauses = [tuple(v - 1 for v in c) for c in f.clauses]
    occ: list[list[int]] = [[] for _ in range(n)]
    for ci, c in enumerate(clauses):
        for v in c:
            occ[v].append(ci)

    val = [-1] * n
    ntrue = [0] * m
    nfalse = [0] * m
    trail: list[int] = []
    nodes = 0
    props = 0

    def assign(v, b, queue):
        # Update every counter before reporting, so undo stays symmetric.
        val[v] = b
        trail.append(v)
        ok = True
        if b:
            for ci in occ[v]:
                t = ntrue[ci] + 1
                ntrue[ci] = t
                if t > 1:
                    ok = False
                else:
                    for u in clauses[ci]:
                        if val[u] < 0:
                            queue.append((u, 0))
        else:
            for ci in occ[v]:
                k = nfalse[ci] + 1
                nfalse[ci] = k
                if k == 3:
                    ok = False
                elif k == 2 and ntrue[ci] == 0:
                    for u in clauses[ci]:
                        if val[u] < 0:
                            queue.append((u, 1))
        return ok

    def undo(mark):
        while len(trail) > mark:
            v = trail.pop()
            if val[v]:
                for ci in occ[v]:
                    ntrue[ci] -= 1
            else:
                for ci in occ[v]:
                    nfalse[ci] -= 1
            val[v] = -1

    def decide(v, b):
        nonlocal props
        queue = []
        if not assign(v, b, queue):
            return False
        i = 0
        while i < len(queue):
            u, want = queue[i]
            i += 1
            cur = val[u]
            if cur == want:
                continue
            if cur >= 0:
                return False
            props += 1
            if not assign(u, want, queue):
                return False
        return True

    def pick():
        best = -1
        for ci in range(m):
            if ntrue[ci] == 0:
                if nfalse[ci] == 1:
                    best = ci
                    break
                if best < 0:
                    best = ci
        if best < 0:
            return -1
        for u in clauses[best]:
            if val[u] < 0:
                return u
        raise AssertionError("live clause without unset variables")

    stack: list[tuple[int, int, int]] = []
    ok = True
    while True:
        if not ok:
            ok = None
            while stack:
                mark, v, phase = stack.pop()
                undo(mark)
                if phase == 0:
                    stack.append((mark, v, 1))
                    ok = decide(v, 0)
                    break
            if ok is None:
                return SolveResult(False, None, nodes, props, time.perf_counter() - t0)
            continue
        v = pick()
        if v < 0:
            witness = np.array([x == 1 for x in val], dtype=bool)
            if not evaluate(f, witness):
                raise AssertionError("solver produced an invalid witness")
            return SolveResult(True, witness, nodes, props, time.perf_counter() - t0)
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise BudgetExceeded(nodes, node_budget)
        stack.append((len(trail), v, 0))
        ok = decide(v, 1)


def brute_force(f: Formula) -> SolveResult:
    """Enumerate all ``2**n`` assignments; also counts the solutions."""
    if f.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force refuses n={f.n} > {BRUTE_FORCE_MAX_N}")
    t0 = time.perf_counter()
    n = f.n
    masks = (np.int64(1) << f.array.astype(np.int64)).sum(axis=1) if f.m else np.zeros(0, np.int64)
    total = 1 << n
    chunk = 1 << 18
    count = 0
    first = None
    for start in range(0, total, chunk):
        a = np.arange(start, min(start + chunk, total), dtype=np.int64)
        good = np.ones(a.shape, dtype=bool)
        for cm in masks:
            hit = a & cm
            # exactly one bit set: nonzero and a power of two
            good &= (hit != 0) & ((hit & (hit - 1)) == 0)
        k = int(good.sum())
        if k and first is None:
            first = int(a[np.argmax(good)])
        count += k
    witness = None
    if first is not None:
        witness = np.array([(first >> i) & 1 for i in range(n)], dtype=bool)
    return SolveResult(count > 0, witness, 0, 0, time.perf_counter() - t0, solutions=count)
