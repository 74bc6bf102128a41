"""
Simulation against the differential equations
==============================================

Run the heuristic on one large random formula and put its scaled clause
counts next to the fluid-limit prediction. Round sizes show how long the
forced cascades get near the peak of the branching factor.
"""

import numpy as np

from ec3lab.formula import generate_random
from ec3lab.ode import OdeConfig, integrate
from ec3lab.sc import run

n, r = 100_000, 0.5
f = generate_random(n, r, seed=2)
res = run(f, seed=2, sample_stride=20)
tr = integrate(OdeConfig(r))
print(f"outcome {res.outcome.value} after {res.rounds} rounds")

x = res.trajectory[:, 0]
keep = x <= tr.x[-1]
s2, s3 = tr.at(x[keep])
gap2 = np.abs(res.trajectory[keep, 1] - s2)
gap3 = np.abs(res.trajectory[keep, 2] - s3)
print(f"largest gap to the ODE: s2 {gap2.max():.4f}, s3 {gap3.max():.4f}")

print("\n    x     sim s2   ode s2")
for target in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7):
    i = np.searchsorted(x, target)
    if i < keep.sum():
        print(f"  {x[i]:.3f}  {res.trajectory[i, 1]:.4f}  {s2[i]:.4f}")

# cascades: mean size tracks mT + mF, but the tail is long
sizes = res.round_sizes
print(f"\nround sizes: mean {sizes.mean():.1f}, 99th pct {np.percentile(sizes, 99):.0f}, max {sizes.max()}")
print(f"ODE mT + mF at its peak: {(tr.m_T + tr.m_F).max():.1f}")
