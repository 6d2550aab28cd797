"""A descriptor chain whose last state is not pinned down by the past.

With F_1 = 0 the dynamics say nothing about x_1, and with H_1 = 0 neither
does the last measurement. The accumulated information matrix Q_1 is then
zero: no direction of x_1 can be estimated, the estimate degenerates to 0
with an infinite error, and the noncausality index is 0.

Adding a measurement of x_1 restores a finite answer.
"""

import numpy as np

from descest import discrete
from descest.model import DescriptorModel, UncertaintyWeights

F = [np.eye(1), np.zeros((1, 1))]
C = [np.eye(1)]
weights = UncertaintyWeights(1.0, [1.0], [1.0, 1.0])
y = [np.array([0.3]), np.array([0.0])]

blind = DescriptorModel(F, C, [np.eye(1), np.zeros((1, 1))])
state = discrete.run(blind, weights, y)[-1]
est = discrete.estimate(state, [1.0])
print(f"blind:    I_N={discrete.noncausality_index(state)}  value={est.value}  error={est.error}")

seen = DescriptorModel(F, C, [np.eye(1), np.eye(1)])
state = discrete.run(seen, weights, [np.array([0.3]), np.array([0.5])])[-1]
est = discrete.estimate(state, [1.0])
print(f"measured: I_N={discrete.noncausality_index(state)}  value={est.value:.4f}  "
      f"error={est.error:.4f}")
