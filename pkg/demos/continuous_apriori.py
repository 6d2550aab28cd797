"""Worst-case error of a linear functional before any data arrives.

Scalar model x' = f on [0, 1] observed through y = x + g, unit weights,
and the functional (ell, x) with ell = 1. The boundary value problem has a
closed-form solution; the midpoint discretization converges to it at
second order.
"""

import numpy as np

from descest import continuous as ct
from descest.model import ContinuousModel

exact = 1 - np.exp(-2) / 2 * (np.e - 1) - (1 - np.exp(-1)) / 2
model = ContinuousModel(F=[[1.0]], C=[[0.0]], ell=[1.0])

prev = None
for K in (25, 50, 100, 200, 400):
    sol = ct.apriori_solve(model, ct.Grid(0.0, 1.0, K))
    err = abs(sol.sigma2 - exact)
    ratio = "" if prev is None else f"  ratio {prev / err:.2f}"
    print(f"K={K:4d}  sigma2={sol.sigma2:.9f}  error={err:.2e}{ratio}")
    prev = err
print(f"closed form      {exact:.9f}")

# a sharper sensor shrinks the guaranteed error
for q2 in (0.1, 1.0, 10.0, 100.0):
    m = ContinuousModel(F=[[1.0]], C=[[0.0]], ell=[1.0], Q2=[[q2]])
    print(f"Q2={q2:6.1f}  sigma2={ct.apriori_solve(m, ct.Grid(0.0, 1.0, 200)).sigma2:.6f}")
