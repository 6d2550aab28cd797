"""Recursive minimax a posteriori estimator for discrete descriptor models.

The recursion carries a quadratic form ``(Q_k x, x) - 2 (r_k, x) + alpha_k``
in the current state: the smallest disturbance budget spent by any
trajectory that ends at ``x`` and reproduces ``y_0..y_k``. Eliminating
``x_k`` when moving to ``x_{k+1}`` is a Schur complement through
``P_k = Q_k + C_k' S_k C_k``.

Notes
-----
The error bound reported by :func:`estimate` is the half-width of the
interval of values ``(ell, x_N)`` over all states consistent with the record.
It depends on the measurements through the bracket ``1 - alpha + (Q^+ r, r)``.

The initial budget ``alpha_0`` is ``(R_0 y_0, y_0)``: the initial residual is
measured against a zero reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import matalg
from .errors import ContractError, InfeasibleError
from .model import DescriptorModel, MeasurementSequence, UncertaintyWeights

OBS_TOL = 1e-8
# Roundoff allowance below zero for 1 - alpha + (Q x, x).
BRACKET_TOL = 1e-9


@dataclass(frozen=True)
class EstimatorState:
    k: int
    Q: np.ndarray
    P: Optional[np.ndarray]
    r: np.ndarray
    alpha: float
    rank_tol: float = 0.0

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def center(self) -> np.ndarray:
        return matalg.pinv(self.Q, self.rank_tol) @ self.r

    @property
    def bracket(self) -> float:
        """``1 - alpha + (Q+ r, r)``, the budget left over at the center."""
        return _bracket(self.alpha, self.r, matalg.pinv(self.Q, self.rank_tol) @ self.r)


@dataclass(frozen=True)
class MinimaxEstimate:
    value: float
    error: float
    observable: bool


@dataclass(frozen=True)
class Ellipsoid:
    """``{x : (Q x, x) - 2 (Q c, x) + alpha <= 1}`` with Chebyshev radius."""

    Q: np.ndarray
    center: np.ndarray
    alpha: float
    radius: float

    def form(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.Q @ x - 2.0 * (self.Q @ self.center) @ x + self.alpha)

    def contains(self, x, slack: float = 0.0) -> bool:
        return self.form(x) <= 1.0 + slack

    @property
    def slack(self) -> float:
        return 1.0 - self.alpha + float(self.center @ self.Q @ self.center)


def _sym(a):
    return 0.5 * (a + a.T)


def _clamp(b, alpha):
    if b >= 0.0:
        return b
    if b < -BRACKET_TOL * max(1.0, abs(alpha)):
        raise InfeasibleError(f"measurement record is inconsistent with the budget (slack {b:.3e})")
    return 0.0


def _bracket(alpha, r, center):
    return _clamp(1.0 - alpha + float(r @ center), alpha)


def _check_y(model, k, y):
    y = matalg.as_vector(y, f"y[{k}]")
    if y.size != model.H[k].shape[0]:
        raise ContractError(f"y[{k}]: dimension {y.size}, expected {model.H[k].shape[0]}")
    return y


def _with_P(model, w, k, Q):
    if k >= model.N:
        return None
    C, S = model.C[k], w.S_seq[k]
    return _sym(Q + C.T @ S @ C)


def init(model: DescriptorModel, w: UncertaintyWeights, y0, rank_tol: float = 0.0) -> EstimatorState:
    y0 = _check_y(model, 0, y0)
    F0, H0, R0 = model.F[0], model.H[0], w.R_seq[0]
    try:
        Q = _sym(F0.T @ w.S @ F0 + H0.T @ R0 @ H0)
        r = H0.T @ R0 @ y0
        alpha = float(y0 @ R0 @ y0)
        P = _with_P(model, w, 0, Q)
    except ValueError as exc:
        raise ContractError(f"dimension mismatch at k=0: {exc}") from exc
    return EstimatorState(0, Q, P, r, alpha, rank_tol)


def step(state: EstimatorState, model: DescriptorModel, w: UncertaintyWeights, y_next) -> EstimatorState:
    """Advance the recursion from ``k`` to ``k + 1`` with measurement ``y_{k+1}``."""
    k = state.k
    if k >= model.N:
        raise ContractError(f"state is already at the horizon N={model.N}")
    y = _check_y(model, k + 1, y_next)
    F, C, H = model.F[k + 1], model.C[k], model.H[k + 1]
    S, R = w.S_seq[k], w.R_seq[k + 1]
    try:
        Pp = matalg.pinv(state.P, state.rank_tol)
        SC = S @ C
        gain = F.T @ SC @ Pp  # F' S C P+
        Q = _sym(H.T @ R @ H + F.T @ (S - SC @ Pp @ SC.T) @ F)
        r = gain @ state.r + H.T @ R @ y
        alpha = state.alpha + float(y @ R @ y) - float(state.r @ Pp @ state.r)
        P = _with_P(model, w, k + 1, Q)
    except ValueError as exc:
        raise ContractError(f"dimension mismatch at k={k + 1}: {exc}") from exc
    return EstimatorState(k + 1, Q, P, r, alpha, state.rank_tol)


def run(model: DescriptorModel, w: UncertaintyWeights, y: MeasurementSequence, rank_tol: float = 0.0):
    """Run the whole recursion; returns the list of states ``k = 0..N``."""
    if len(y) != model.N + 1:
        raise ContractError(f"expected {model.N + 1} measurements, got {len(y)}")
    states = [init(model, w, y[0], rank_tol)]
    for k in range(model.N):
        states.append(step(states[-1], model, w, y[k + 1]))
    return states


def is_observable(Q, Qp, ell, tol=OBS_TOL) -> bool:
    return bool(np.linalg.norm(Qp @ (Q @ ell) - ell) <= tol * np.linalg.norm(ell))


def estimate(state: EstimatorState, ell, obs_tol: float = OBS_TOL) -> MinimaxEstimate:
    """Minimax estimate of ``(ell, x_k)`` and its guaranteed error.

    Directions outside the range of ``Q_k`` cannot be estimated: the value
    is 0 and the error is infinite.
    """
    ell = matalg.as_vector(ell, "ell")
    if ell.size != state.n:
        raise ContractError(f"direction has dimension {ell.size}, expected {state.n}")
    Qp = matalg.pinv(state.Q, state.rank_tol)
    if not is_observable(state.Q, Qp, ell, obs_tol):
        return MinimaxEstimate(0.0, float("inf"), False)
    center = Qp @ state.r
    b = _bracket(state.alpha, state.r, center)
    spread = max(float(ell @ Qp @ ell), 0.0)
    return MinimaxEstimate(float(ell @ center), float(np.sqrt(b * spread)), True)


def noncausality_index(state: EstimatorState) -> int:
    """Rank of ``Q_k``: the number of independent observable directions."""
    return matalg.rank(state.Q, state.rank_tol)


def is_causal(state: EstimatorState) -> bool:
    return noncausality_index(state) == state.n


def posterior_ellipsoid(state: EstimatorState) -> Ellipsoid:
    """Set of states consistent with the record, with its Chebyshev radius.

    The radius is infinite unless ``Q_k`` has full rank.
    """
    Q = state.Q
    center = matalg.pinv(Q, state.rank_tol) @ state.r
    b = _clamp(1.0 - state.alpha + float(center @ Q @ center), state.alpha)
    radius = float("inf")
    if noncausality_index(state) == state.n:
        lam_min = matalg.eig_sym(Q)[0][-1]
        radius = float(np.sqrt(b) / np.sqrt(lam_min))
    return Ellipsoid(Q.copy(), center, state.alpha, radius)

