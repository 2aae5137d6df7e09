"""Fundamental lemma for finite-record frequency-domain data.

Trajectories of the unknown system are represented as ``Psi_L(data) @ G`` with
coefficients ``G = (G0, G1, conj(G1))``.  Finite-record data carries a
boundary (transient) term that is absorbed by an extra phasor input channel
``Omega_k = exp(j omega_k)``; a trajectory of the original system is one whose
image on that channel vanishes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .lti import IoSpectrumData, Trajectory
from .spectra import (
    DEFAULT_TOL_REL,
    build_Psi,
    check_pe,
    numerical_rank,
    realify_Psi,
    stack_spectra,
)


class PeShortfallWarning(UserWarning):
    """The data is not persistently exciting of the order a result relies on."""


class RankCertificate(NamedTuple):
    rank: int
    full_row_rank: bool


@dataclass(frozen=True)
class MembershipSolution:
    feasible: bool
    G0: float
    G1: np.ndarray
    residual: float
    pe_shortfall: bool = False

    @property
    def coefficients(self) -> np.ndarray:
        """Full coefficient vector ``(G0, G1, conj(G1))``."""
        return np.concatenate([[self.G0], self.G1, np.conj(self.G1)])


def default_tol_abs(traj: Trajectory) -> float:
    scale = max(np.abs(traj.u).max(), np.abs(traj.y).max())
    return 1e-7 * (1.0 + scale)


def _state_dim(data: IoSpectrumData, n_x: Optional[int]) -> Optional[int]:
    if n_x is not None:
        return n_x
    return None if data.X is None else data.X.dim


def _pe_shortfall(data, order: int, transient: bool, tol_rel: float) -> bool:
    S = stack_spectra(data.U, data.Omega) if transient else data.U
    return not check_pe(S, order, tol_rel).is_pe


def rank_certificate(data: IoSpectrumData, L: int, tol_rel: float = DEFAULT_TOL_REL) -> RankCertificate:
    """Numerical rank of ``[Psi_1(X); Psi_L(U); Psi_L(Omega)]``.

    Full row rank (``n_x + L (n_u + 1)``) is guaranteed for controllable
    systems when ``(U, Omega)`` is persistently exciting of order ``L + n_x``;
    a :class:`PeShortfallWarning` is issued when that hypothesis fails.
    """
    if data.X is None:
        raise ValueError("rank certificate needs the state spectrum X")
    n_x = data.X.dim
    if _pe_shortfall(data, L + n_x, True, tol_rel):
        warnings.warn(
            f"(U, Omega) is not persistently exciting of order {L + n_x}",
            PeShortfallWarning,
            stacklevel=2,
        )
    stacked = np.vstack([
        build_Psi(data.X, 1),
        build_Psi(data.U, L),
        build_Psi(data.Omega, L),
    ])
    rank, _ = numerical_rank(stacked, tol_rel)
    return RankCertificate(rank, rank == n_x + L * (data.n_u + 1))


def _check_traj(data: IoSpectrumData, traj: Trajectory):
    if traj.u.shape[1] != data.n_u or traj.y.shape[1] != data.n_y:
        raise ValueError(
            f"trajectory dimensions ({traj.u.shape[1]}, {traj.y.shape[1]}) do not match "
            f"data ({data.n_u}, {data.n_y})"
        )


def _membership(blocks, rhs, traj, tol_abs, M, pe_shortfall):
    A = np.vstack(blocks)
    phi = np.linalg.lstsq(A, rhs, rcond=None)[0]
    residual = float(np.abs(A @ phi - rhs).max())
    if tol_abs is None:
        tol_abs = default_tol_abs(traj)
    # [Re F | Im F[1:]] @ (G0, a, b) == Psi @ (G0, G1, conj G1) for G1 = (a - jb)/2
    G1 = (phi[1:M] - 1j * phi[M:]) / 2
    return MembershipSolution(residual < tol_abs, float(phi[0]), G1, residual, pe_shortfall)


def membership_transient(data: IoSpectrumData, traj: Trajectory, tol_abs: Optional[float] = None,
                         n_x: Optional[int] = None, tol_rel: float = DEFAULT_TOL_REL) -> MembershipSolution:
    """Decide whether ``traj`` is an input/output trajectory of the system behind ``data``.

    Solves ``[u; 0; y] = [Psi_L(U); Psi_L(Omega); Psi_L(Y)] (G0, G1, G1*)`` in
    its real-valued form by least squares.  The zero block forces the phasor
    channel, which only carries the record's boundary term, to stay silent.

    ``n_x`` (defaulting to the dimension of ``data.X`` when present) is used
    only to set the ``pe_shortfall`` flag.
    """
    _check_traj(data, traj)
    L = len(traj)
    n_x = _state_dim(data, n_x)
    shortfall = n_x is not None and _pe_shortfall(data, L + n_x, True, tol_rel)
    blocks = [realify_Psi(data.U, L), realify_Psi(data.Omega, L), realify_Psi(data.Y, L)]
    rhs = np.concatenate([traj.u.ravel(), np.zeros(L), traj.y.ravel()])
    return _membership(blocks, rhs, traj, tol_abs, data.grid.M, shortfall)


def membership_steady(data: IoSpectrumData, traj: Trajectory, tol_abs: Optional[float] = None,
                      n_x: Optional[int] = None, tol_rel: float = DEFAULT_TOL_REL) -> MembershipSolution:
    """Membership test that assumes steady-state (periodic) data; no phasor channel."""
    _check_traj(data, traj)
    L = len(traj)
    n_x = _state_dim(data, n_x)
    shortfall = n_x is not None and _pe_shortfall(data, L + n_x, False, tol_rel)
    blocks = [realify_Psi(data.U, L), realify_Psi(data.Y, L)]
    rhs = np.concatenate([traj.u.ravel(), traj.y.ravel()])
    return _membership(blocks, rhs, traj, tol_abs, data.grid.M, shortfall)


def generate_trajectory(data: IoSpectrumData, G0: float, G1, L: int):
    """Map coefficients ``(G0, G1)`` to a length-``L`` trajectory.

    Returns:
        ``(traj, defect)`` where ``defect`` is the length-``L`` image on the
        phasor channel.  ``traj`` is a trajectory of the system only when the
        defect is zero.
    """
    G1 = np.asarray(G1, dtype=complex).reshape(-1)
    if G1.size != data.grid.M - 1:
        raise ValueError(f"G1 must have length {data.grid.M - 1}, got {G1.size}")
    g = np.concatenate([[float(G0)], G1, np.conj(G1)])
    u = (build_Psi(data.U, L) @ g).real.reshape(L, data.n_u)
    y = (build_Psi(data.Y, L) @ g).real.reshape(L, data.n_y)
    defect = (build_Psi(data.Omega, L) @ g).real
    return Trajectory(u, y), defect
