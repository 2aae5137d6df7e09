"""Discrete-time LTI models, simulation and finite-record input/output spectra."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spectra import (
    DEFAULT_TOL_REL,
    FrequencyGrid,
    Spectrum,
    dft,
    numerical_rank,
    phasor_spectrum,
)


class EigenvalueError(ValueError):
    """Raised when a resolvent ``(zI - A)^-1`` is evaluated at (or next to) an eigenvalue."""


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """``x[k+1] = A x[k] + B u[k]``, ``y[k] = C x[k] + D u[k]``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        mats = {}
        for name in "ABCD":
            m = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            if m.ndim != 2:
                raise ValueError(f"{name} must be a matrix, got shape {m.shape}")
            m.setflags(write=False)
            mats[name] = m
        A, B, C, D = mats["A"], mats["B"], mats["C"], mats["D"]
        n_x = A.shape[0]
        if A.shape != (n_x, n_x):
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape[0] != n_x:
            raise ValueError(f"B has {B.shape[0]} rows, expected {n_x}")
        if C.shape[1] != n_x:
            raise ValueError(f"C has {C.shape[1]} columns, expected {n_x}")
        if D.shape != (C.shape[0], B.shape[1]):
            raise ValueError(f"D must be {(C.shape[0], B.shape[1])}, got {D.shape}")
        for name, m in mats.items():
            object.__setattr__(self, name, m)

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.B.shape[1]

    @property
    def n_y(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True, eq=False)
class IoSpectrumData:
    """Input/output spectra (and optionally the state spectrum) of one record."""

    U: Spectrum
    Y: Spectrum
    X: Optional[Spectrum] = None

    def __post_init__(self):
        for name in ("Y", "X"):
            s = getattr(self, name)
            if s is not None and s.grid != self.U.grid:
                raise ValueError(f"{name} is sampled on a different grid than U")

    @property
    def grid(self) -> FrequencyGrid:
        return self.U.grid

    @property
    def n_u(self) -> int:
        return self.U.dim

    @property
    def n_y(self) -> int:
        return self.Y.dim

    @property
    def Omega(self) -> Spectrum:
        return phasor_spectrum(self.grid)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Finite input/output trajectory, arrays of shape ``(L, n_u)`` and ``(L, n_y)``."""

    u: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if u.ndim == 1:
            u = u[:, None]
        if y.ndim == 1:
            y = y[:, None]
        if u.ndim != 2 or y.ndim != 2:
            raise ValueError("trajectory channels must be sequences of vectors")
        if u.shape[0] != y.shape[0] or u.shape[0] < 1:
            raise ValueError(f"u and y must have equal positive length, got {len(u)} and {len(y)}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.u.shape[0]


def _as_inputs(model: StateSpaceModel, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None] if model.n_u == 1 else u[None, :]
    if u.ndim != 2 or u.shape[1] != model.n_u:
        raise ValueError(f"input must have shape (N, {model.n_u}), got {np.shape(u)}")
    return u


def _as_state(model: StateSpaceModel, x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (model.n_x,):
        raise ValueError(f"state must have length {model.n_x}, got {x0.size}")
    return x0


def simulate(model: StateSpaceModel, u, x0):
    """Run the recursion for ``N = len(u)`` steps.

    Returns:
        ``(x, y)`` with ``x`` of shape ``(N+1, n_x)`` (the final state
        included) and ``y`` of shape ``(N, n_y)``.
    """
    u = _as_inputs(model, u)
    x0 = _as_state(model, x0)
    N = u.shape[0]
    x = np.empty((N + 1, model.n_x))
    x[0] = x0
    Bu = u @ model.B.T
    for k in range(N):
        x[k + 1] = model.A @ x[k] + Bu[k]
    y = x[:N] @ model.C.T + u @ model.D.T
    return x, y


def _resolvent_solve(A: np.ndarray, z: complex, rhs: np.ndarray, tol_rel: float) -> np.ndarray:
    Z = z * np.eye(A.shape[0]) - A
    cond = np.linalg.cond(Z, 1) if A.size else 1.0
    if not np.isfinite(cond) or cond > 1.0 / tol_rel:
        raise EigenvalueError(
            f"evaluation at eigenvalue: zI - A is singular to working precision at z={z} "
            f"(condition {cond:.3g})"
        )
    return np.linalg.solve(Z, rhs)


def transfer_function(model: StateSpaceModel, z: complex, tol_rel: float = DEFAULT_TOL_REL) -> np.ndarray:
    """``H(z) = C (zI - A)^-1 B + D`` as an ``(n_y, n_u)`` complex matrix."""
    X = _resolvent_solve(model.A, z, model.B.astype(complex), tol_rel)
    return model.C @ X + model.D


def transient(model: StateSpaceModel, dx, z: complex, tol_rel: float = DEFAULT_TOL_REL) -> np.ndarray:
    """``T(z) = C (zI - A)^-1 z dx`` with ``dx = x_0 - x_2M``."""
    dx = _as_state(model, dx)
    return model.C @ _resolvent_solve(model.A, z, z * dx.astype(complex), tol_rel)


def observability_matrix(model: StateSpaceModel, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    blocks = [model.C]
    for _ in range(k - 1):
        blocks.append(blocks[-1] @ model.A)
    return np.vstack(blocks)


def controllability_matrix(model: StateSpaceModel) -> np.ndarray:
    blocks = [model.B]
    for _ in range(model.n_x - 1):
        blocks.append(model.A @ blocks[-1])
    return np.hstack(blocks)


def observability_index(model: StateSpaceModel, tol_rel: float = DEFAULT_TOL_REL) -> int:
    """Smallest ``k`` at which ``rank O_k`` reaches its maximum."""
    ranks = [numerical_rank(observability_matrix(model, k), tol_rel)[0]
             for k in range(1, max(model.n_x, 1) + 1)]
    return int(np.argmax(ranks)) + 1


def is_controllable(model: StateSpaceModel, tol_rel: float = DEFAULT_TOL_REL) -> bool:
    return numerical_rank(controllability_matrix(model), tol_rel)[0] == model.n_x


def augment(model: StateSpaceModel, dx) -> StateSpaceModel:
    """Absorb the boundary term as an extra input: ``(A, [B dx], C, [D 0])``."""
    dx = _as_state(model, dx)
    return StateSpaceModel(
        model.A,
        np.hstack([model.B, dx[:, None]]),
        model.C,
        np.hstack([model.D, np.zeros((model.n_y, 1))]),
    )


def periodic_state(model: StateSpaceModel, u) -> np.ndarray:
    """Initial state for which one pass of ``u`` returns to it (``x_N = x_0``).

    Requires ``A**N`` to have no eigenvalue equal to one.
    """
    u = _as_inputs(model, u)
    x_forced = simulate(model, u, np.zeros(model.n_x))[0][-1]
    AN = np.linalg.matrix_power(model.A, u.shape[0])
    return np.linalg.solve(np.eye(model.n_x) - AN, x_forced)


def experiment_to_spectrum(model: StateSpaceModel, u, x0, grid: FrequencyGrid):
    """Simulate a ``2M``-sample experiment and return its spectra.

    Returns:
        ``(data, dx)``: the input/state/output spectra and the boundary term
        ``dx = x_0 - x_2M``.  ``dx`` is ground truth for checks only; the
        data-driven routines never need it.
    """
    u = _as_inputs(model, u)
    if u.shape[0] != 2 * grid.M:
        raise ValueError(f"expected {2 * grid.M} input samples, got {u.shape[0]}")
    x, y = simulate(model, u, x0)
    data = IoSpectrumData(dft(u, grid), dft(y, grid), dft(x[:-1], grid))
    return data, x[0] - x[-1]


def spectrum_residual(model: StateSpaceModel, data: IoSpectrumData, dx) -> float:
    """Largest relative defect of the finite-record state/output relations.

    Checks ``Omega_k X_k = A X_k + B U_k + Omega_k dx`` and
    ``Y_k = C X_k + D U_k`` at every grid index; requires ``data.X``.
    """
    if data.X is None:
        raise ValueError("state spectrum required")
    dx = _as_state(model, dx)
    X, U, Y = data.X.values, data.U.values, data.Y.values
    Om = data.grid.phasors[:, None]
    r_state = Om * X - X @ model.A.T - U @ model.B.T - Om * dx[None, :]
    r_out = Y - X @ model.C.T - U @ model.D.T
    scale = max(np.abs(X).max(), np.abs(U).max(), np.abs(Y).max(), np.abs(dx).max(), 1e-300)
    return float(max(np.abs(r_state).max(), np.abs(r_out).max()) / scale)
