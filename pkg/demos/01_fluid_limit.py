"""
The fluid limit of the short-clause heuristic
=============================================

Integrate the 2- and 3-clause densities as the fraction x of set variables
grows, watch the branching factor of the unit-propagation cascade, and find
the largest starting density that keeps the cascade subcritical.
"""

import numpy as np

from ec3lab.ode import OdeConfig, critical_r, integrate, max_lambda1
from ec3lab.policy import Policy

# start at the density where the short-clause analysis just works
tr = integrate(OdeConfig(0.546))
x_at, lam = max_lambda1(tr)
print(f"terminal: {tr.terminal.value} at x = {tr.terminal_x:.4f}")
print(f"largest branching factor {lam:.4f} at x = {x_at:.4f}")
print(f"3-clauses left per free variable: {tr.residual_density:.4f}")

# a few points along the way; s3 has the exact form r (1 - x)^3
print("\n    x      s2       s3      lambda1   mT     mF")
for x in np.linspace(0, 0.75, 6):
    i = np.searchsorted(tr.x, x)
    print(f"  {tr.x[i]:.2f}  {tr.s2[i]:.5f}  {tr.s3[i]:.5f}  {tr.lambda1[i]:.4f}  {tr.m_T[i]:5.2f}  {tr.m_F[i]:5.2f}")

# a little higher and the cascade goes supercritical partway through
hot = integrate(OdeConfig(0.60, step=1e-4))
print(f"\nr = 0.60: {hot.terminal.value} at x = {hot.terminal_x:.4f}")

# critical densities per free-step policy; a coarse step keeps this quick
print("\ncritical densities (step 1e-4, tol 1e-3):")
for name in ("sc", "r3", "rv", "rv-false"):
    r = critical_r(Policy.parse(name), tol=1e-3, step=1e-4)
    print(f"  {name:9s} {r:.4f}")
