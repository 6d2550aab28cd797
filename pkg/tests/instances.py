"""Random test instances for the discrete estimator."""

import numpy as np

from descest.model import DescriptorModel, UncertaintyWeights, disturbance_cost, residuals_of


def spd(rng, k, lo=0.5):
    A = rng.standard_normal((k, k))
    W = A @ A.T / k + lo * np.eye(k)
    return 0.5 * (W + W.T)


def rank_deficient(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


def random_instance(rng, n, N, descriptor=False, budget=0.5):
    """Model, weights and a measurement record consistent with the budget.

    With `descriptor` the F matrices may be singular or non-square. The
    record comes from a random trajectory whose residuals are scaled to
    spend exactly `budget`.
    """
    def rows():
        return int(rng.integers(max(1, n - 1), n + 2)) if descriptor else n

    def Fmat(m):
        if descriptor and rng.random() < 0.5 and n > 1:
            return rank_deficient(rng, m, n, int(rng.integers(1, min(m, n) + 1)))
        return rng.standard_normal((m, n))

    m0 = rows()
    F = [Fmat(m0)]
    C = []
    for _ in range(N):
        m = rows()
        F.append(Fmat(m))
        C.append(0.8 * rng.standard_normal((m, n)))
    H = [rng.standard_normal((int(rng.integers(1, n + 1)), n)) for _ in range(N + 1)]
    model = DescriptorModel(F, C, H)
    w = UncertaintyWeights(
        spd(rng, m0),
        [spd(rng, c.shape[0]) for c in C],
        [spd(rng, h.shape[0]) for h in H],
    )
    x = [rng.standard_normal(n) for _ in range(N + 1)]
    y = [h @ xk + 0.3 * rng.standard_normal(h.shape[0]) for h, xk in zip(H, x)]
    cost = disturbance_cost(w, residuals_of(model, x, y))
    s = np.sqrt(budget / cost)
    return model, w, [s * v for v in y], [s * v for v in x]
