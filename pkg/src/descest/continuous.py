"""Minimax estimators for continuous-time descriptor models.

Both estimators reduce to linear two-point boundary value problems. They are
solved on a uniform grid in the SVD frame of ``F``: with ``F = L Lam R`` the
rotated unknowns split into a differential part (first ``r`` components,
scaled by the nonzero singular values) and an algebraic part. Differential
equations are discretized by the implicit midpoint rule on each interval;
algebraic equations are imposed at every node. The whole grid is assembled
into one sparse system and factored once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import matalg
from .errors import ContractError, IllPosedError
from .model import ContinuousModel


@dataclass(frozen=True)
class Grid:
    t0: float
    T: float
    K: int

    def __post_init__(self):
        if self.K < 2:
            raise ContractError("grid needs K >= 2 intervals")
        if not self.T > self.t0:
            raise ContractError("grid needs T > t0")

    @classmethod
    def for_model(cls, model: ContinuousModel, K: int) -> "Grid":
        return cls(model.t0, model.T, K)

    @property
    def h(self) -> float:
        return (self.T - self.t0) / self.K

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.t0, self.T, self.K + 1)

    @property
    def midpoints(self) -> np.ndarray:
        t = self.nodes
        return 0.5 * (t[:-1] + t[1:])


@dataclass(frozen=True)
class BlockDecomposition:
    """SVD of ``F`` and the blocks of ``L' C(t) R'`` at every grid node."""

    svd: matalg.SvdFactorization
    grid: Grid
    C1: np.ndarray
    C2: np.ndarray
    C3: np.ndarray
    C4: np.ndarray

    @property
    def r(self) -> int:
        return self.svd.rank

    def reassemble(self) -> np.ndarray:
        """``C(t)`` recovered from the blocks, shape ``(K+1, m, n)``."""
        top = np.concatenate([self.C1, self.C2], axis=2)
        bottom = np.concatenate([self.C3, self.C4], axis=2)
        rotated = np.concatenate([top, bottom], axis=1)
        return self.svd.left @ rotated @ self.svd.right


@dataclass(frozen=True)
class BvpSolution:
    """Grid functions of a solved estimator; fields not produced stay ``None``.

    A priori solves fill `z`, `p`, `d`, `u_hat` and `sigma2`; a posteriori
    solves fill `x_hat` and `q` (both in original coordinates) and the
    rotated-frame pieces `x1`, `x2`, `q1`, `q2`.
    """

    grid: Grid
    z: Optional[np.ndarray] = None
    p: Optional[np.ndarray] = None
    d: Optional[np.ndarray] = None
    u_hat: Optional[np.ndarray] = None
    sigma2: Optional[float] = None
    x_hat: Optional[np.ndarray] = None
    q: Optional[np.ndarray] = None
    x1: Optional[np.ndarray] = None
    x2: Optional[np.ndarray] = None
    q1: Optional[np.ndarray] = None
    q2: Optional[np.ndarray] = None


class ConditionA(NamedTuple):
    holds: bool
    sup_estimate: float


def _rotated_C(model, svd, times):
    C = model.sample("C", times)
    if C.shape[1:] != model.F.shape:
        raise ContractError(f"C(t) has shape {C.shape[1:]}, expected {model.F.shape}")
    return svd.left.T @ C @ svd.right.T


def block_decompose(model: ContinuousModel, grid: Optional[Grid] = None,
                    rank_tol: float = 0.0) -> BlockDecomposition:
    grid = grid or Grid(model.t0, model.T, 2)
    svd = matalg.svd_factor(model.F, rank_tol)
    r = svd.rank
    Ct = _rotated_C(model, svd, grid.nodes)
    return BlockDecomposition(
        svd, grid, Ct[:, :r, :r], Ct[:, :r, r:], Ct[:, r:, :r], Ct[:, r:, r:]
    )


def _opnorm(a):
    return np.linalg.norm(a, 2) if a.size else 0.0


def check_condition_a(blocks: BlockDecomposition, eps_samples: int = 50,
                      eps_min: float = 1e-6, eps_max: float = 0.99) -> ConditionA:
    """Probe ``sup_eps || (eps^2 E + C4'C4)^{-1} C2' ||`` for boundedness.

    The norm is the largest pointwise operator norm over the grid nodes.
    Divergence is declared when the norm grows by more than a factor 10
    between ``eps_min`` and ``10 eps_min`` (it grows like ``eps^-2`` whenever the
    supremum is infinite).
    """
    if eps_samples < 3:
        raise ContractError("eps_samples must be at least 3")
    eps = np.geomspace(eps_min, eps_max, eps_samples)
    C2, C4 = blocks.C2, blocks.C4
    k = C4.shape[2]
    if C2.size == 0 or k == 0:
        return ConditionA(True, 0.0)
    norms = np.empty(eps.size)
    for j, e in enumerate(eps):
        worst = 0.0
        for C2t, C4t in zip(C2, C4):
            M = e * e * np.eye(k) + C4t.T @ C4t
            worst = max(worst, _opnorm(np.linalg.solve(M, C2t.T)))
        norms[j] = worst
    ref = min(int(np.searchsorted(eps, 10.0 * eps_min)), eps.size - 1)
    ratio = norms[0] / norms[ref] if norms[ref] > 0 else (np.inf if norms[0] > 0 else 1.0)
    return ConditionA(bool(ratio <= 10.0), float(norms.max()))


def _factor_solve(M, rhs, what):
    M = M.tocsc()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            lu = spla.splu(M)
            sol = lu.solve(rhs)
    except (RuntimeError, spla.MatrixRankWarning) as exc:
        raise IllPosedError(
            f"{what}: discretized boundary value problem is singular; "
            f"the minimax error is not finite in this direction ({exc})"
        ) from exc
    if not np.all(np.isfinite(sol)):
        raise IllPosedError(f"{what}: solution is not finite")
    res = np.linalg.norm(M @ sol - rhs)
    if res > 1e-6 * max(1.0, np.linalg.norm(rhs)):
        raise IllPosedError(f"{what}: discretized system is numerically singular (residual {res:.2e})")
    return sol


class _Assembler:
    """Accumulates dense blocks into a COO sparse matrix."""

    def __init__(self, rows, cols):
        self.shape = (rows, cols)
        self.I, self.J, self.V = [], [], []

    def add(self, r0, c0, block):
        block = np.atleast_2d(block)
        if block.size == 0:
            return
        ii, jj = np.nonzero(block)
        self.I.append(ii + r0)
        self.J.append(jj + c0)
        self.V.append(block[ii, jj])

    def matrix(self):
        if not self.I:
            return sp.csc_matrix(self.shape)
        return sp.coo_matrix(
            (np.concatenate(self.V), (np.concatenate(self.I), np.concatenate(self.J))),
            shape=self.shape,
        ).tocsc()


def _inv_sym(a, name):
    a = np.asarray(a, dtype=float)
    try:
        return np.linalg.inv(0.5 * (a + a.T))
    except np.linalg.LinAlgError as exc:
        raise ContractError(f"{name} must be positive definite") from exc


def apriori_solve(model: ContinuousModel, grid: Grid, rank_tol: float = 0.0) -> BvpSolution:
    """Minimax a priori estimator of ``int (ell, x) dt``.

    Solves, for ``z`` (size m), ``p`` (size n) and a constant ``d`` with
    ``F'd = 0``::

        d/dt F'z = -C'z + H'Q2 H p - ell,    F'z(T) = 0
        d/dt F p =  C p + Q1^{-1} z,         F p(t0) = Q0^{-1} (F F+ z(t0) + d)

    The estimator weights are ``u_hat = Q2 H p`` and the squared worst-case
    error is ``int (ell, p) dt`` (trapezoid rule).

    Raises
    ------
    IllPosedError
        If the discretized system is singular.
    """
    svd = matalg.svd_factor(model.F, rank_tol)
    Lm, Rm, r = svd.left, svd.right, svd.rank
    s = svd.singular_values[:r]
    m, n = model.m, model.n
    K, h = grid.K, grid.h
    tn, tm = grid.nodes, grid.midpoints

    def frame(times):
        Ct = _rotated_C(model, svd, times)
        W = np.stack([Lm.T @ _inv_sym(Q1, "Q1(t)") @ Lm for Q1 in model.sample("Q1", times)])
        H = model.sample("H", times)
        Q2 = model.sample("Q2", times)
        M = Rm @ np.transpose(H, (0, 2, 1)) @ Q2 @ H @ Rm.T
        ell = model.sample("ell", times) @ Rm.T
        return Ct, W, M, ell

    Cn, Wn, Mn, elln = frame(tn)
    Cm, Wm, Mm, ellm = frame(tm)
    V = Lm.T @ _inv_sym(model.Q0, "Q0") @ Lm

    blk = n + m  # per node: [p~ (n), z~ (m)]
    nd = m - r
    n_unk = (K + 1) * blk + nd
    A = _Assembler(n_unk, n_unk)
    rhs = np.zeros(n_unk)

    def P(i):
        return i * blk

    def Z(i):
        return i * blk + n

    row = 0
    Sr = np.diag(s)
    for i in range(K):
        C, W, M, ell = Cm[i], Wm[i], Mm[i], ellm[i]
        # Lam d/dt p~ = C~ p~ + W z~   (first r rows)
        for a, sign in ((i, -1.0), (i + 1, 1.0)):
            Dp = np.zeros((r, n))
            Dp[:, :r] = sign * Sr
            A.add(row, P(a), Dp - 0.5 * h * C[:r, :])
            A.add(row, Z(a), -0.5 * h * W[:r, :])
        row += r
        # Lam' d/dt z~ = -C~' z~ + M p~ - ell~   (first r rows)
        for a, sign in ((i, -1.0), (i + 1, 1.0)):
            Dz = np.zeros((r, m))
            Dz[:, :r] = sign * Sr
            A.add(row, Z(a), Dz + 0.5 * h * C.T[:r, :])
            A.add(row, P(a), -0.5 * h * M[:r, :])
        rhs[row:row + r] = -h * ell[:r]
        row += r
    for j in range(K + 1):
        C, W, M, ell = Cn[j], Wn[j], Mn[j], elln[j]
        A.add(row, P(j), C[r:, :])
        A.add(row, Z(j), W[r:, :])
        row += m - r
        A.add(row, Z(j), -C.T[r:, :])
        A.add(row, P(j), M[r:, :])
        rhs[row:row + n - r] = ell[r:]
        row += n - r
    # F'z(T) = 0  <=>  z~_1(T) = 0
    A.add(row, Z(K), np.eye(r, m))
    row += r
    # Lam p~(t0) = V [z~_1(t0); delta]
    A.add(row, P(0), svd.lam)
    A.add(row, Z(0), -V[:, :r] @ np.eye(r, m))
    A.add(row, (K + 1) * blk, -V[:, r:])
    row += m
    assert row == n_unk

    sol = _factor_solve(A.matrix(), rhs, "a priori estimator")
    nodes = sol[: (K + 1) * blk].reshape(K + 1, blk)
    p = nodes[:, :n] @ Rm
    z = nodes[:, n:] @ Lm.T
    delta = sol[(K + 1) * blk:]
    d = Lm[:, r:] @ delta
    H = model.sample("H", tn)
    Q2 = model.sample("Q2", tn)
    u_hat = np.einsum("kij,kjl,kl->ki", Q2, H, p)
    ell = model.sample("ell", tn)
    sigma2 = float(np.trapezoid(np.sum(ell * p, axis=1), tn))
    return BvpSolution(grid, z=z, p=p, d=d, u_hat=u_hat, sigma2=sigma2)


def split_measurements(y, svd: matalg.SvdFactorization):
    """Rotate ``y`` into the right-singular frame and split at the rank."""
    yt = np.asarray(y, dtype=float) @ svd.right.T
    return yt[:, : svd.rank], yt[:, svd.rank:]


def _posterior_coefficients(C, s):
    """Coefficient matrices of the reduced a posteriori system at one time."""
    r = s.size
    C1, C2, C3, C4 = C[:r, :r], C[:r, r:], C[r:, :r], C[r:, r:]
    k = C4.shape[1]
    Ainv = np.linalg.inv(np.eye(k) + C4.T @ C4)
    Er, Em = np.eye(r), np.eye(C4.shape[0])
    return {
        "xx": C1 - C2 @ Ainv @ C4.T @ C3,
        "xq": C2 @ Ainv @ C2.T + Er,
        "xy2": C2 @ Ainv,
        "qq": -C1.T + C3.T @ C4 @ Ainv @ C2.T,
        "qy2": C3.T @ C4 @ Ainv,
        "qx": C3.T @ (Em - C4 @ Ainv @ C4.T) @ C3 + Er,
        "Ainv": Ainv,
        "blocks": (C1, C2, C3, C4),
    }


def _recover_algebraic(coef, x1, q1, y2):
    C1, C2, C3, C4 = coef["blocks"]
    Ainv = coef["Ainv"]
    w = C2.T @ q1 + y2
    x2 = -Ainv @ C4.T @ C3 @ x1 + Ainv @ w
    q2 = -(np.eye(C4.shape[0]) - C4 @ Ainv @ C4.T) @ C3 @ x1 - C4 @ Ainv @ w
    return x2, q2


def aposteriori_solve(model: ContinuousModel, y, grid: Grid, rank_tol: float = 0.0) -> BvpSolution:
    """Minimax a posteriori estimate of the full state from ``y = x + eta``.

    The disturbance set is ``int ||f||^2 + ||eta||^2 dt <= 1`` (weights in
    `model` are ignored) and ``F x(t0) = 0``. In the right-singular frame
    the differential components ``x1`` and the costate ``q1`` solve::

        Sig x1' = (C1 - C2 A C4'C3) x1 + (C2 A C2' + E) q1 + C2 A y2,      x1(t0) = 0
        Sig q1' = (-C1' + C3'C4 A C2') q1 + C3'C4 A y2 - y1
                  + (C3'(E - C4 A C4')C3 + E) x1,                           q1(T) = 0

    with ``A = (E + C4'C4)^{-1}`` and ``Sig`` the nonzero singular values of
    ``F``; ``x2`` and ``q2`` then follow pointwise.

    Parameters
    ----------
    y : array_like, shape (K+1, n)
        Measurements at the grid nodes.
    """
    if not model.uses_identity_observation(grid.nodes):
        raise ContractError("a posteriori solver assumes full-state observation y = x + eta")
    n, K, h = model.n, grid.K, grid.h
    y = np.asarray(y, dtype=float)
    if y.shape != (K + 1, n):
        raise ContractError(f"measurements must have shape {(K + 1, n)}, got {y.shape}")
    svd = matalg.svd_factor(model.F, rank_tol)
    r = svd.rank
    s = svd.singular_values[:r]
    y1, y2 = split_measurements(y, svd)
    y1m, y2m = 0.5 * (y1[:-1] + y1[1:]), 0.5 * (y2[:-1] + y2[1:])
    Cn = _rotated_C(model, svd, grid.nodes)
    Cm = _rotated_C(model, svd, grid.midpoints)

    x1 = np.zeros((K + 1, r))
    q1 = np.zeros((K + 1, r))
    if r:
        blk = 2 * r  # per node: [x1, q1]
        n_unk = (K + 1) * blk
        A = _Assembler(n_unk, n_unk)
        rhs = np.zeros(n_unk)
        Sr = np.diag(s)
        row = 0
        for i in range(K):
            c = _posterior_coefficients(Cm[i], s)
            X0, X1 = i * blk, (i + 1) * blk
            A.add(row, X0, -Sr - 0.5 * h * c["xx"])
            A.add(row, X1, Sr - 0.5 * h * c["xx"])
            A.add(row, X0 + r, -0.5 * h * c["xq"])
            A.add(row, X1 + r, -0.5 * h * c["xq"])
            rhs[row:row + r] = h * c["xy2"] @ y2m[i]
            row += r
            A.add(row, X0 + r, -Sr - 0.5 * h * c["qq"])
            A.add(row, X1 + r, Sr - 0.5 * h * c["qq"])
            A.add(row, X0, -0.5 * h * c["qx"])
            A.add(row, X1, -0.5 * h * c["qx"])
            rhs[row:row + r] = h * (c["qy2"] @ y2m[i] - y1m[i])
            row += r
        A.add(row, 0, np.eye(r))
        row += r
        A.add(row, K * blk + r, np.eye(r))
        row += r
        sol = _factor_solve(A.matrix(), rhs, "a posteriori estimator").reshape(K + 1, blk)
        x1, q1 = sol[:, :r], sol[:, r:]

    m = model.m
    x2 = np.zeros((K + 1, n - r))
    q2 = np.zeros((K + 1, m - r))
    for j in range(K + 1):
        c = _posterior_coefficients(Cn[j], s)
        x2[j], q2[j] = _recover_algebraic(c, x1[j], q1[j], y2[j])
    x_hat = np.hstack([x1, x2]) @ svd.right
    q = np.hstack([q1, q2]) @ svd.left.T
    return BvpSolution(grid, x_hat=x_hat, q=q, x1=x1, x2=x2, q1=q1, q2=q2)


def functional_estimate(sol: BvpSolution, ell) -> float:
    """Trapezoid integral of ``(ell(t), x_hat(t))`` (or of ``p`` for a priori solutions).

    `ell` may be a constant vector, an array of node values or a callable.
    """
    values = sol.x_hat if sol.x_hat is not None else sol.p
    if values is None:
        raise ContractError("solution carries no state-like grid function")
    t = sol.grid.nodes
    if callable(ell):
        L = np.stack([np.atleast_1d(np.asarray(ell(tk), dtype=float)) for tk in t])
    else:
        L = np.asarray(ell, dtype=float)
        if L.ndim <= 1:
            L = np.broadcast_to(np.atleast_1d(L), values.shape)
    if L.shape != values.shape:
        raise ContractError(f"ell has shape {L.shape}, grid function has {values.shape}")
    return float(np.trapezoid(np.sum(L * values, axis=1), t))
