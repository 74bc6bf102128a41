"""
What is left when the 2-clauses die out
=======================================

Stop the heuristic the first time the 2-clauses are exhausted, look at the
clause-interaction graph of the leftover 3-clauses, and satisfy it leaf by
leaf when it is a forest.
"""

from ec3lab.formula import evaluate, generate_random
from ec3lab.residual import NotForest, build_graph, is_forest, leaf_peel_satisfy
from ec3lab.sc import Outcome, run

n, r = 10_000, 0.546
found = 0
for seed in range(2000):
    f = generate_random(n, r, seed=seed)
    res = run(f, seed=seed, stop_at_s2_extinction=True)
    if res.outcome is not Outcome.S2_EXHAUSTED:
        continue
    found += 1
    g = build_graph(res.residual)
    forest, biggest = is_forest(g)
    x = res.trajectory[-1, 0]
    print(f"seed {seed}: 2-clauses gone at x = {x:.3f}, {g.n_nodes} clauses left, "
          f"{g.n_edges} edges, largest component {biggest}, forest {forest}")
    try:
        a = leaf_peel_satisfy(res.residual)
        print(f"  leaf peeling satisfies it: {evaluate(res.residual, a)}")
    except NotForest:
        print("  a cycle is present, leaf peeling does not apply")
    if found == 5:
        break
