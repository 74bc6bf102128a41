"""Clause-interaction graphs and the leaf-peeling satisfier for sparse residuals.

Two clauses are adjacent when they share at least one variable. Clauses that
share a variable form a clique, so in a forest every variable occurs in at
most two clauses and a clause has at most one neighbour left when it is
peeled. Assigning in reverse peeling order therefore only ever meets
variables fixed by that one neighbour.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .formula import Formula, evaluate

__all__ = ["InteractionGraph", "NotForest", "build_graph", "is_forest", "leaf_peel_satisfy"]


class NotForest(ValueError):
    """The clause-interaction graph has a cycle."""


@dataclass(frozen=True)
class InteractionGraph:
    n_nodes: int
    edges: np.ndarray  # (E, 2), rows i < j, sorted
    labels: np.ndarray  # component id per node
    components: list[tuple[int, int]]  # (size, edge count), largest first

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbours(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for i, j in self.edges.tolist():
            adj[i].append(j)
            adj[j].append(i)
        return adj


def build_graph(f: Formula) -> InteractionGraph:
    m = f.m
    occ: dict[int, list[int]] = {}
    for ci, c in enumerate(f.clauses):
        for v in c:
            occ.setdefault(v, []).append(ci)
    pairs = set()
    for cs in occ.values():
        for a in range(len(cs)):
            for b in range(a + 1, len(cs)):
                pairs.add((cs[a], cs[b]))
    edges = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)

    if m == 0:
        return InteractionGraph(0, edges, np.zeros(0, dtype=np.int64), [])
    adj = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(m, m))
    k, labels = connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=k)
    ecount = np.bincount(labels[edges[:, 0]], minlength=k) if len(edges) else np.zeros(k, dtype=np.int64)
    comps = sorted(zip(sizes.tolist(), ecount.tolist()), reverse=True)
    return InteractionGraph(m, edges, labels, comps)


def is_forest(g: InteractionGraph) -> tuple[bool, int]:
    """Whether every component is a tree, and the largest component size."""
    forest = all(e == s - 1 for s, e in g.components)
    biggest = g.components[0][0] if g.components else 0
    return forest, biggest


def leaf_peel_satisfy(f: Formula) -> np.ndarray:
    """Satisfying assignment for a formula whose interaction graph is a forest.

    Raises :class:`NotForest` otherwise.
    """
    g = build_graph(f)
    if not is_forest(g)[0]:
        raise NotForest("clause-interaction graph contains a cycle")
    adj = g.neighbours()
    deg = [len(a) for a in adj]
    removed = [False] * g.n_nodes
    heap = [ci for ci in range(g.n_nodes) if deg[ci] <= 1]
    heapq.heapify(heap)
    order = []
    while heap:
        ci = heapq.heappop(heap)
        if removed[ci]:
            continue
        removed[ci] = True
        order.append(ci)
        for nb in adj[ci]:
            if not removed[nb]:
                deg[nb] -= 1
                if deg[nb] <= 1:
                    heapq.heappush(heap, nb)
    assert len(order) == g.n_nodes, "forest did not peel completely"

    value: dict[int, bool] = {}
    for ci in reversed(order):
        c = f.clauses[ci]
        fixed = [v for v in c if v in value]
        trues = sum(value[v] for v in fixed)
        assert trues <= 1, f"clause {ci} already has two true variables"
        free = [v for v in c if v not in value]
        if trues == 0:
            assert free, f"clause {ci} fully assigned with no true variable"
            value[free[0]] = True
            free = free[1:]
        for v in free:
            value[v] = False

    out = np.zeros(f.n, dtype=bool)
    for v, b in value.items():
        out[v - 1] = b
    if not evaluate(f, out):
        raise AssertionError("leaf peeling produced an invalid assignment")
    return out
