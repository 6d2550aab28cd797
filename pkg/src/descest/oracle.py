"""Brute-force reference for the discrete estimator.

Builds the full quadratic cost over the stacked trajectory ``x_0..x_N``,

    J(x) = (S F_0 x_0, F_0 x_0)
           + sum_i (S_i (F_{i+1} x_{i+1} - C_i x_i), .)
           + sum_i (R_i (y_i - H_i x_i), .)
         = x' A x - 2 b' x + c,

and minimizes it densely. Nothing here uses the recursive estimator; the two
routes only meet in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matalg
from .model import DescriptorModel, MeasurementSequence, UncertaintyWeights


@dataclass(frozen=True)
class StackedSolution:
    x_stack: np.ndarray
    min_cost: float
    marginal_Q: np.ndarray
    marginal_center: np.ndarray
    marginal_alpha: float
    n: int

    @property
    def states(self):
        return self.x_stack.reshape(-1, self.n)

    def marginal_form(self, x) -> float:
        """Value of the marginal quadratic in ``x_N`` (cost minimized over the rest)."""
        x = np.asarray(x, dtype=float)
        Q, c = self.marginal_Q, self.marginal_center
        return float(x @ Q @ x - 2.0 * (Q @ c) @ x + self.marginal_alpha)


@dataclass(frozen=True)
class DirectionalInterval:
    lo: float
    hi: float

    @property
    def center(self) -> float:
        if np.isinf(self.lo) or np.isinf(self.hi):
            return 0.0
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)


def assemble(model: DescriptorModel, w: UncertaintyWeights, y: MeasurementSequence):
    """Dense ``(A, b, c)`` with ``J(x) = x'Ax - 2b'x + c``."""
    n, N = model.n, model.N
    dim = n * (N + 1)
    A = np.zeros((dim, dim))
    b = np.zeros(dim)
    c = 0.0

    def blk(i):
        return slice(i * n, (i + 1) * n)

    F0 = model.F[0]
    A[blk(0), blk(0)] += F0.T @ w.S @ F0
    for i in range(N):
        # residual f_i = D_i [x_i; x_{i+1}]
        D = np.hstack([-model.C[i], model.F[i + 1]])
        A[i * n:(i + 2) * n, i * n:(i + 2) * n] += D.T @ w.S_seq[i] @ D
    for i in range(N + 1):
        H, R = model.H[i], w.R_seq[i]
        yi = np.asarray(y[i], dtype=float).reshape(-1)
        A[blk(i), blk(i)] += H.T @ R @ H
        b[blk(i)] += H.T @ R @ yi
        c += float(yi @ R @ yi)
    return 0.5 * (A + A.T), b, c


def stacked_cost(model, w, y, x_stack) -> float:
    """Evaluate J as a sum of weighted squared residuals (never negative)."""
    n, N = model.n, model.N
    x = np.asarray(x_stack, dtype=float).reshape(N + 1, n)
    q = model.F[0] @ x[0]
    total = float(q @ w.S @ q)
    for i in range(N):
        f = model.F[i + 1] @ x[i + 1] - model.C[i] @ x[i]
        total += float(f @ w.S_seq[i] @ f)
    for i in range(N + 1):
        g = np.asarray(y[i], dtype=float).reshape(-1) - model.H[i] @ x[i]
        total += float(g @ w.R_seq[i] @ g)
    return total


def stacked_minimize(model: DescriptorModel, w: UncertaintyWeights, y: MeasurementSequence,
                     rank_tol: float = 0.0) -> StackedSolution:
    """Minimize the stacked cost and marginalize it onto the last state.

    Flat directions are resolved by the minimum-norm minimizer. The marginal
    form in ``x_N`` is the Schur complement of the leading ``nN`` block.
    """
    n, N = model.n, model.N
    A, b, c = assemble(model, w, y)
    x = matalg.pinv(A, rank_tol) @ b
    min_cost = stacked_cost(model, w, y, x)

    u, v = slice(0, n * N), slice(n * N, n * (N + 1))
    Auu_p = matalg.pinv(A[u, u], rank_tol) if N else np.zeros((0, 0))
    Avu = A[v, u]
    Qm = A[v, v] - Avu @ Auu_p @ Avu.T
    Qm = 0.5 * (Qm + Qm.T)
    bm = b[v] - Avu @ Auu_p @ b[u]
    alpha = c - float(b[u] @ Auu_p @ b[u])
    center = matalg.pinv(Qm, rank_tol) @ bm
    return StackedSolution(x, min_cost, Qm, center, alpha, n)


def direction_interval(stacked: StackedSolution, ell, obs_tol: float = 1e-8) -> DirectionalInterval:
    """Range of ``(ell, x_N)`` over states whose marginal cost is at most 1."""
    ell = matalg.as_vector(ell, "ell")
    Q = stacked.marginal_Q
    Qp = matalg.pinv(Q)
    if np.linalg.norm(Qp @ Q @ ell - ell) > obs_tol * np.linalg.norm(ell):
        return DirectionalInterval(-np.inf, np.inf)
    mid = float(ell @ stacked.marginal_center)
    half = float(np.sqrt(max(0.0, 1.0 - stacked.min_cost) * max(0.0, float(ell @ Qp @ ell))))
    return DirectionalInterval(mid - half, mid + half)


def sampled_radius(ellipsoid, samples: int = 10_000, seed: int = 0) -> float:
    """Monte-Carlo lower bound on the Chebyshev radius of an ellipsoid.

    Points ``c + sqrt(slack) Q^{-1/2} u`` with ``u`` uniform on the unit
    sphere lie on the boundary; the largest distance to the center is
    returned. `ellipsoid` needs attributes ``Q``, ``center`` and ``alpha``.
    """
    Q = np.asarray(ellipsoid.Q, dtype=float)
    center = np.asarray(ellipsoid.center, dtype=float)
    slack = 1.0 - float(ellipsoid.alpha) + float(center @ Q @ center)
    slack = max(slack, 0.0)
    lam, V = matalg.eig_sym(Q)
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((samples, Q.shape[0]))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    # Q^{-1/2} u in the eigenbasis
    pts = (U @ V) / np.sqrt(lam)
    return float(np.sqrt(slack) * np.max(np.linalg.norm(pts, axis=1)))
