"""A two-step scalar chain worked by the recursion and by brute force.

Model: x_1 = x_0 + f_0, y_k = x_k + g_k, all weights one, record y = (0, 1).
The set of states compatible with a unit disturbance budget is an interval;
the recursion gives its center and half-width without forming the stacked
problem.
"""

import numpy as np

from descest import discrete, oracle
from descest.model import DescriptorModel, UncertaintyWeights

model = DescriptorModel.constant(1.0, 1.0, 1.0, N=1)
weights = UncertaintyWeights.constant(1.0, 1.0, 1.0, N=1)
y = [np.array([0.0]), np.array([1.0])]

for state in discrete.run(model, weights, y):
    print(f"k={state.k}: Q={state.Q[0, 0]:.6f} r={state.r[0]:.6f} alpha={state.alpha:.6f}")

state = discrete.run(model, weights, y)[-1]
est = discrete.estimate(state, [1.0])
print(f"estimate of x_1: {est.value:.6f} +/- {est.error:.6f}")

ellipsoid = discrete.posterior_ellipsoid(state)
print(f"ellipsoid center {ellipsoid.center[0]:.6f}, radius {ellipsoid.radius:.6f}")

stacked = oracle.stacked_minimize(model, weights, y)
iv = oracle.direction_interval(stacked, [1.0])
print(f"brute force: x = {stacked.x_stack}, min cost {stacked.min_cost:.6f}, "
      f"interval [{iv.lo:.6f}, {iv.hi:.6f}]")
