"""Descriptor models, uncertainty weights and disturbance realizations.

Discrete-time model over a finite horizon ``N``::

    F[0] x[0] = q
    F[k+1] x[k+1] - C[k] x[k] = f[k]      k = 0..N-1
    y[k] = H[k] x[k] + g[k]               k = 0..N

with the disturbance budget

    G = (S q, q) + sum_k (S_seq[k] f[k], f[k]) + sum_k (R_seq[k] g[k], g[k]) <= 1.

Row counts may change from step to step; every matrix has ``n`` columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matalg
from .errors import ContractError, InfeasibleError


def _mats(seq, name):
    return tuple(matalg.as_matrix(a, f"{name}[{i}]") for i, a in enumerate(seq))


@dataclass(frozen=True)
class DescriptorModel:
    F: tuple
    C: tuple
    H: tuple
    time_invariant: bool = False

    def __post_init__(self):
        object.__setattr__(self, "F", _mats(self.F, "F"))
        object.__setattr__(self, "C", _mats(self.C, "C"))
        object.__setattr__(self, "H", _mats(self.H, "H"))
        if len(self.F) < 1:
            raise ContractError("model needs at least F[0]")

    @classmethod
    def constant(cls, F, C, H, N: int, F0=None) -> "DescriptorModel":
        """Time-invariant model; `F0` defaults to `F`."""
        F = matalg.as_matrix(F, "F")
        F0 = F if F0 is None else F0
        return cls((F0,) + (F,) * N, (C,) * N, (H,) * (N + 1), time_invariant=True)

    @property
    def n(self) -> int:
        return self.F[0].shape[1]

    @property
    def N(self) -> int:
        return len(self.F) - 1


@dataclass(frozen=True)
class UncertaintyWeights:
    S: np.ndarray
    S_seq: tuple
    R_seq: tuple

    def __post_init__(self):
        object.__setattr__(self, "S", matalg.as_matrix(self.S, "S"))
        object.__setattr__(self, "S_seq", _mats(self.S_seq, "S_seq"))
        object.__setattr__(self, "R_seq", _mats(self.R_seq, "R_seq"))

    @classmethod
    def constant(cls, S, S_step, R, N: int) -> "UncertaintyWeights":
        return cls(S, (S_step,) * N, (R,) * (N + 1))


@dataclass(frozen=True)
class DisturbanceRealization:
    q: np.ndarray
    f: tuple
    g: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", matalg.as_vector(self.q, "q"))
        object.__setattr__(self, "f", tuple(matalg.as_vector(v, "f") for v in self.f))
        object.__setattr__(self, "g", tuple(matalg.as_vector(v, "g") for v in self.g))

    @classmethod
    def zeros(cls, model: DescriptorModel) -> "DisturbanceRealization":
        return cls(
            np.zeros(model.F[0].shape[0]),
            tuple(np.zeros(c.shape[0]) for c in model.C),
            tuple(np.zeros(h.shape[0]) for h in model.H),
        )

    def scaled(self, c: float) -> "DisturbanceRealization":
        return DisturbanceRealization(c * self.q, [c * v for v in self.f], [c * v for v in self.g])


# Trajectories and measurement records are plain sequences of 1-D arrays.
Trajectory = Sequence[np.ndarray]
MeasurementSequence = Sequence[np.ndarray]


def _definiteness(name, W, strict):
    if W.shape[0] != W.shape[1]:
        return f"{name}: weight must be square, got {W.shape}"
    if not np.allclose(W, W.T, rtol=1e-10, atol=1e-12 * max(1.0, np.abs(W).max(initial=0))):
        return f"{name}: weight is not symmetric"
    if strict and not matalg.is_pd(W):
        return f"{name}: weight is not positive definite"
    if not strict and not matalg.is_psd(W):
        return f"{name}: weight is not positive semidefinite"
    return None


def validate(model: DescriptorModel, w: UncertaintyWeights) -> list[str]:
    """Check dimensions and definiteness; return human-readable diagnostics.

    An empty list means the model and weights conform.
    """
    out = []
    n, N = model.n, model.N
    for name, seq in (("F", model.F), ("C", model.C), ("H", model.H)):
        for k, a in enumerate(seq):
            if a.shape[1] != n:
                out.append(f"{name}[{k}] (k={k}): has {a.shape[1]} columns, expected n={n}")
    if len(model.C) != N:
        out.append(f"C: expected {N} matrices (k=0..{N - 1}), got {len(model.C)}")
    if len(model.H) != N + 1:
        out.append(f"H: expected {N + 1} matrices (k=0..{N}), got {len(model.H)}")
    for k in range(min(N, len(model.C))):
        if model.C[k].shape[0] != model.F[k + 1].shape[0]:
            out.append(
                f"C[{k}] (k={k}): has {model.C[k].shape[0]} rows but F[{k + 1}] has "
                f"{model.F[k + 1].shape[0]}"
            )

    msg = _definiteness("S", w.S, strict=False)
    if msg:
        out.append(msg)
    if w.S.shape[0] != model.F[0].shape[0]:
        out.append(f"S: size {w.S.shape[0]} does not match F[0] rows {model.F[0].shape[0]}")
    if len(w.S_seq) != N:
        out.append(f"S_seq: expected {N} weights, got {len(w.S_seq)}")
    if len(w.R_seq) != N + 1:
        out.append(f"R_seq: expected {N + 1} weights, got {len(w.R_seq)}")
    for k, Sk in enumerate(w.S_seq):
        msg = _definiteness(f"S_seq[{k}] (k={k})", Sk, strict=True)
        if msg:
            out.append(msg)
        if k < len(model.C) and Sk.shape[0] != model.C[k].shape[0]:
            out.append(f"S_seq[{k}] (k={k}): size {Sk.shape[0]} does not match C[{k}] rows")
    for k, Rk in enumerate(w.R_seq):
        msg = _definiteness(f"R_seq[{k}] (k={k})", Rk, strict=True)
        if msg:
            out.append(msg)
        if k < len(model.H) and Rk.shape[0] != model.H[k].shape[0]:
            out.append(f"R_seq[{k}] (k={k}): size {Rk.shape[0]} does not match H[{k}] rows")
    return out


def validate_measurements(model: DescriptorModel, y: MeasurementSequence) -> list[str]:
    out = []
    if len(y) != model.N + 1:
        out.append(f"measurements: expected {model.N + 1} vectors, got {len(y)}")
    for k, (yk, Hk) in enumerate(zip(y, model.H)):
        if np.size(yk) != Hk.shape[0]:
            out.append(f"y[{k}] (k={k}): dimension {np.size(yk)}, expected {Hk.shape[0]}")
    return out


def _quad(W, v):
    return float(v @ W @ v)


def disturbance_cost(w: UncertaintyWeights, d: DisturbanceRealization) -> float:
    """Evaluate the quadratic budget G(q, {f_k}, {g_k})."""
    if w.S.shape[0] != d.q.size or len(d.f) > len(w.S_seq) or len(d.g) > len(w.R_seq):
        raise ContractError("disturbance does not conform to the weights")
    total = _quad(w.S, d.q)
    try:
        total += sum(_quad(Sk, fk) for Sk, fk in zip(w.S_seq, d.f))
        total += sum(_quad(Rk, gk) for Rk, gk in zip(w.R_seq, d.g))
    except ValueError as exc:
        raise ContractError(f"disturbance does not conform to the weights: {exc}") from exc
    return total


def residuals_of(model: DescriptorModel, x: Trajectory, y: MeasurementSequence) -> DisturbanceRealization:
    """Disturbance realization that makes `(x, y)` consistent with the model."""
    N = model.N
    if len(x) != N + 1 or len(y) != N + 1:
        raise ContractError(f"expected {N + 1} states and measurements")
    x = [matalg.as_vector(v, "x") for v in x]
    y = [matalg.as_vector(v, "y") for v in y]
    try:
        q = model.F[0] @ x[0]
        f = [model.F[k + 1] @ x[k + 1] - model.C[k] @ x[k] for k in range(N)]
        g = [y[k] - model.H[k] @ x[k] for k in range(N + 1)]
    except ValueError as exc:
        raise ContractError(f"dimension mismatch: {exc}") from exc
    return DisturbanceRealization(q, f, g)


def _solve_step(A, b, seed, where, tol):
    Ap = matalg.pinv(A)
    x = Ap @ b + seed - Ap @ (A @ seed)
    res = np.linalg.norm(A @ x - b)
    if res > tol * max(1.0, np.linalg.norm(b)):
        raise InfeasibleError(f"{where}: no state satisfies the dynamics (residual {res:.3e})")
    return x


def simulate(model: DescriptorModel, d: DisturbanceRealization, x_free=None, tol: float = 1e-9):
    """Propagate the descriptor dynamics forward.

    Each step solves ``F[k+1] x[k+1] = C[k] x[k] + f[k]`` by the minimum-norm
    solution plus the null-space projection of `x_free`. The initial state
    solves ``F[0] x[0] = q`` the same way.

    Returns
    -------
    x, y : list of ndarray
        States ``x[0..N]`` and measurements ``y[k] = H[k] x[k] + g[k]``.

    Raises
    ------
    InfeasibleError
        When a step has no solution; the message names the step index.
    """
    n, N = model.n, model.N
    seed = np.zeros(n) if x_free is None else matalg.as_vector(x_free, "x_free")
    if seed.size != n or len(d.f) != N or len(d.g) != N + 1:
        raise ContractError("disturbance or seed does not conform to the model")
    x = [_solve_step(model.F[0], d.q, seed, "initial condition", tol)]
    for k in range(N):
        b = model.C[k] @ x[k] + d.f[k]
        x.append(_solve_step(model.F[k + 1], b, seed, f"step k={k}", tol))
    y = [model.H[k] @ x[k] + d.g[k] for k in range(N + 1)]
    return x, y


# -- continuous time ---------------------------------------------------------

@dataclass(frozen=True)
class ContinuousModel:
    """Continuous-time descriptor model ``d/dt F x = C(t) x + f``, ``y = H(t) x + eta``.

    Time-dependent fields (`C`, `H`, `Q1`, `Q2`, `ell`) accept a constant
    array, an array of samples on a uniform grid over ``[t0, T]`` (leading
    axis is time; values between samples are linearly interpolated) or a
    callable ``t -> array``. `H` and the weights default to identities and
    `ell` to zero.
    """

    F: np.ndarray
    C: object
    t0: float = 0.0
    T: float = 1.0
    H: object = None
    Q0: object = None
    Q1: object = None
    Q2: object = None
    ell: object = None

    def __post_init__(self):
        F = matalg.as_matrix(self.F, "F")
        object.__setattr__(self, "F", F)
        if not self.t0 < self.T:
            raise ContractError("need t0 < T")
        m, n = F.shape
        defaults = {"H": np.eye(n), "Q0": np.eye(m), "Q1": np.eye(m), "ell": np.zeros(n)}
        for name, default in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
        if self.Q2 is None:
            p = self.at("H", self.t0).shape[0]
            object.__setattr__(self, "Q2", np.eye(p))
        object.__setattr__(self, "Q0", matalg.as_matrix(self.Q0, "Q0"))

    @property
    def m(self) -> int:
        return self.F.shape[0]

    @property
    def n(self) -> int:
        return self.F.shape[1]

    def at(self, name: str, t: float) -> np.ndarray:
        """Value of a time-dependent field at time `t`."""
        value = getattr(self, name)
        if callable(value):
            return np.asarray(value(t), dtype=float)
        arr = np.asarray(value, dtype=float)
        base_ndim = 1 if name == "ell" else 2
        if arr.ndim == base_ndim:
            return arr
        if arr.ndim != base_ndim + 1:
            raise ContractError(f"{name}: unexpected array shape {arr.shape}")
        K = arr.shape[0] - 1
        if K < 1:
            return arr[0]
        s = (t - self.t0) / (self.T - self.t0) * K
        i = int(np.clip(np.floor(s), 0, K - 1))
        theta = s - i
        return (1.0 - theta) * arr[i] + theta * arr[i + 1]

    def sample(self, name: str, times) -> np.ndarray:
        return np.stack([self.at(name, t) for t in times])

    def uses_identity_observation(self, times) -> bool:
        return all(
            np.array_equal(self.at("H", t), np.eye(self.n)) for t in times
        )
