"""Data-driven evaluation of the transfer function and the record transient.

Given finite-record spectra ``(U, Y)`` of an unknown system, the response
``Y_z = H(z) U_z`` and the transient ``T(z)`` at any complex ``z`` that is not
a pole are the unique ``Y``-blocks of small linear systems assembled from
the data matrices.  :func:`estimate_noisy` replaces the data matrix by a
truncated structured SVD basis before solving, which makes the evaluation
usable with noisy measurements.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .lti import IoSpectrumData
from .spectra import (
    DEFAULT_TOL_REL,
    build_F,
    check_pe,
    numerical_rank,
    realify_Psi,
    stack_spectra,
    window_vector,
)


class EvaluationError(ValueError):
    """The evaluation system does not determine the requested response."""

    def __init__(self, message, condition=np.inf):
        super().__init__(message)
        self.condition = condition


class PeShortfallError(ValueError):
    """``(U, Omega)`` is not persistently exciting enough for the evaluation."""


class RankDeficiencyWarning(UserWarning):
    """The data matrix has lower rank than the truncation target of the estimator."""


@dataclass(frozen=True)
class EvalResult:
    Yz: np.ndarray
    Tz: np.ndarray
    condition: float
    L0: int


@dataclass(frozen=True)
class StructuredSvd:
    """SVD ``A = U S V^H`` of ``A = [A0 | A1 | conj(A1)]`` with a real ``U``.

    ``V^H = [V0 | V1 | conj(V1)]`` with ``V0`` real of shape ``(m, m0)`` and
    ``V1`` complex of shape ``(m, m1)``; ``S`` has the shape ``(n, m)`` of
    ``A`` with the ``rank`` positive singular values leading its diagonal.
    """

    U: np.ndarray
    S: np.ndarray
    V0: np.ndarray
    V1: np.ndarray
    rank: int

    @property
    def singular_values(self) -> np.ndarray:
        return np.diagonal(self.S).copy()

    @property
    def V(self) -> np.ndarray:
        return np.hstack([self.V0, self.V1, np.conj(self.V1)]).conj().T


def _structured_rows(Q: np.ndarray, m0: int, m1: int):
    # real coordinates [q0, qr, qi] <-> structured row [q0, (qr + j qi)/sqrt2, conj]
    V0 = Q[:, :m0]
    V1 = (Q[:, m0:m0 + m1] + 1j * Q[:, m0 + m1:]) / np.sqrt(2.0)
    return V0, V1


def _real_coordinates(A0, A1) -> np.ndarray:
    return np.hstack([A0, np.sqrt(2.0) * A1.real, np.sqrt(2.0) * A1.imag])


def structured_svd(A0, A1, tol_rel: float = DEFAULT_TOL_REL, method: str = "svd") -> StructuredSvd:
    """Structured SVD of ``[A0 | A1 | conj(A1)]``.

    The left factor comes from ``A A^H = A0 A0^T + 2 Re(A1 A1^H)``, which is
    real.  ``method="eigh"`` eigendecomposes that Gram matrix and forms
    ``V^H = S1^-1 U^T A`` directly; ``method="svd"`` (default) takes the real
    SVD of ``[A0, sqrt2 Re A1, sqrt2 Im A1]``, which has the same Gram matrix
    but keeps small singular values accurate.  In both cases the right factor
    is completed to a full unitary matrix inside the structured subspace.
    """
    A0 = np.asarray(A0, dtype=float)
    A1 = np.asarray(A1, dtype=complex)
    if A0.ndim == 1:
        A0 = A0[:, None]
    if A1.ndim == 1:
        A1 = A1[:, None]
    if A0.shape[0] != A1.shape[0]:
        raise ValueError(f"blocks have {A0.shape[0]} and {A1.shape[0]} rows")
    n = A0.shape[0]
    m0, m1 = A0.shape[1], A1.shape[1]
    m = m0 + 2 * m1
    R = _real_coordinates(A0, A1)

    if method == "svd":
        U, s, Qt = np.linalg.svd(R, full_matrices=True)
        rank = int(np.count_nonzero(s > tol_rel * s[0])) if s.size and s[0] > 0 else 0
        Q = Qt
    elif method == "eigh":
        w, U = np.linalg.eigh(R @ R.T)
        order = np.argsort(w)[::-1]
        w, U = np.clip(w[order], 0.0, None), U[:, order]
        s = np.sqrt(w)[:min(n, m)]
        rank = int(np.count_nonzero(s > tol_rel * s[0])) if s.size and s[0] > 0 else 0
        lead = (U[:, :rank].T @ R) / s[:rank, None]
        rest = scipy.linalg.null_space(lead).T if rank else np.eye(m)
        Q = np.vstack([lead, rest])
    else:
        raise ValueError(f"unknown method {method!r}")

    S = np.zeros((n, m))
    idx = np.arange(rank)
    S[idx, idx] = s[:rank]
    V0, V1 = _structured_rows(Q, m0, m1)
    return StructuredSvd(U, S, V0, V1, rank)


def _eval_rows(data: IoSpectrumData, L: int) -> int:
    return (data.n_u + 1 + data.n_y) * L


def _rhs(data: IoSpectrumData, z: complex, L: int, Uz=None, transient=False) -> np.ndarray:
    W = window_vector(z, L)
    b = np.zeros(_eval_rows(data, L), dtype=complex)
    nu = data.n_u * L
    if Uz is not None:
        b[:nu] = np.kron(W, Uz)
    if transient:
        b[nu:nu + L] = W * z
    return b


def _solve_on_basis(Q: np.ndarray, data: IoSpectrumData, z: complex, L: int,
                    rhs: np.ndarray, tol_rel: float):
    """Solve ``[[0; -W kron I] | Q] [Y; g] = rhs`` for the ``Y`` block.

    ``Q`` is a real orthonormal basis of the data column space; eliminating
    ``g`` leaves ``N E Y = -N rhs`` with ``N = I - Q Q^T``.
    """
    n_y = data.n_y
    E = np.zeros((_eval_rows(data, L), n_y), dtype=complex)
    E[(data.n_u + 1) * L:] = np.kron(window_vector(z, L)[:, None], np.eye(n_y))
    NE = E - Q @ (Q.T @ E)
    Nb = rhs - Q @ (Q.T @ rhs)
    # amplification from the window block onto its part outside the data range
    s_min = np.linalg.svd(NE, compute_uv=False)[-1]
    cond = float(np.linalg.norm(E, 2) / s_min) if s_min > 0 else np.inf
    if not cond < 1.0 / tol_rel:
        raise EvaluationError(
            f"response at z={z} is not determined by the data (condition {cond:.3g})", cond
        )
    Y = np.linalg.lstsq(NE, -Nb, rcond=None)[0]
    return Y, cond


def _data_basis(data: IoSpectrumData, L: int, tol_rel: float) -> np.ndarray:
    P = np.vstack([realify_Psi(data.U, L), realify_Psi(data.Omega, L), realify_Psi(data.Y, L)])
    U, s, _ = np.linalg.svd(P, full_matrices=False)
    rank = int(np.count_nonzero(s > tol_rel * s[0])) if s[0] > 0 else 0
    return U[:, :rank]


def _require_pe(data: IoSpectrumData, L0: int, n_x: Optional[int], tol_rel: float):
    if n_x is None:
        n_x = data.X.dim if data.X is not None else L0
    order = L0 + 1 + n_x
    if not check_pe(stack_spectra(data.U, data.Omega), order, tol_rel).is_pe:
        raise PeShortfallError(f"(U, Omega) is not persistently exciting of order {order}")


def _as_input(data: IoSpectrumData, Uz) -> np.ndarray:
    Uz = np.atleast_1d(np.asarray(Uz, dtype=complex))
    if Uz.shape != (data.n_u,):
        raise ValueError(f"Uz must have length {data.n_u}, got shape {Uz.shape}")
    return Uz


def evaluate_joint(data: IoSpectrumData, z: complex, Uz, L0: int, n_x: Optional[int] = None,
                   tol_rel: float = DEFAULT_TOL_REL) -> EvalResult:
    """Evaluate ``Y_z = H(z) U_z`` and ``T_z = T(z)`` from noise-free data.

    Both systems share one matrix, built with window length ``L0 + 1``; they
    are solved together with two right-hand sides.  ``L0`` must be at least
    the observability index of the system.  ``n_x`` (or the dimension of
    ``data.X``, or ``L0`` when neither is known) sets the excitation order
    that is checked.

    Raises:
        PeShortfallError: ``(U, Omega)`` is not persistently exciting of
            order ``L0 + 1 + n_x``.
        EvaluationError: the response is not uniquely determined at ``z``
            (``z`` at or near a pole of the system).
    """
    Uz = _as_input(data, Uz)
    _require_pe(data, L0, n_x, tol_rel)
    L = L0 + 1
    Q = _data_basis(data, L, tol_rel)
    rhs = np.column_stack([_rhs(data, z, L, Uz=Uz), _rhs(data, z, L, transient=True)])
    Y, cond = _solve_on_basis(Q, data, z, L, rhs, tol_rel)
    return EvalResult(Y[:, 0], Y[:, 1], cond, L0)


def evaluate_frf(data: IoSpectrumData, z: complex, Uz, L0: int, n_x: Optional[int] = None,
                 tol_rel: float = DEFAULT_TOL_REL) -> np.ndarray:
    """``H(z) U_z`` from finite-record data, with the transient eliminated."""
    Uz = _as_input(data, Uz)
    _require_pe(data, L0, n_x, tol_rel)
    L = L0 + 1
    Y, _ = _solve_on_basis(_data_basis(data, L, tol_rel), data, z, L,
                           _rhs(data, z, L, Uz=Uz)[:, None], tol_rel)
    return Y[:, 0]


def evaluate_transient(data: IoSpectrumData, z: complex, L0: int, n_x: Optional[int] = None,
                       tol_rel: float = DEFAULT_TOL_REL) -> np.ndarray:
    """The record transient ``T(z)`` contained in the data."""
    _require_pe(data, L0, n_x, tol_rel)
    L = L0 + 1
    Y, _ = _solve_on_basis(_data_basis(data, L, tol_rel), data, z, L,
                           _rhs(data, z, L, transient=True)[:, None], tol_rel)
    return Y[:, 0]


def _stacked_F(data: IoSpectrumData, L: int) -> np.ndarray:
    return np.vstack([build_F(data.U, L), build_F(data.Omega, L), build_F(data.Y, L)])


def rank_heuristic_check(data: IoSpectrumData, L0: int, n_x_guess: int,
                         tol_rel: float = DEFAULT_TOL_REL):
    """Compare the data-matrix rank with ``(n_u+1)(L0+1) + n_x_guess``.

    Returns:
        ``(observed_rank, expected, gap)`` where ``gap`` is the ratio of the
        singular value just past the expected rank to the last one inside
        it (small for a clear noise floor, 0 when there is none).
    """
    L = L0 + 1
    expected = (data.n_u + 1) * L + n_x_guess
    P = np.vstack([realify_Psi(data.U, L), realify_Psi(data.Omega, L), realify_Psi(data.Y, L)])
    observed, s = numerical_rank(P, tol_rel)
    if expected < 1 or expected >= s.size or s[expected - 1] == 0:
        gap = 0.0
    else:
        gap = float(s[expected] / s[expected - 1])
    return observed, expected, gap


def estimate_noisy(data: IoSpectrumData, z: complex, Uz, n_x_guess: int, L0: Optional[int] = None,
                   tol_rel: float = DEFAULT_TOL_REL) -> EvalResult:
    """Noise-robust estimate of ``H(z) U_z`` and ``T(z)``.

    The data matrix is replaced by its leading ``(n_u+1)(L0+1) + n_x_guess``
    left singular vectors from :func:`structured_svd` (a real basis), after
    which both responses are solved as in :func:`evaluate_joint`.  ``L0``
    defaults to ``n_x_guess``.
    """
    if n_x_guess < 1:
        raise ValueError(f"model order guess must be positive, got {n_x_guess}")
    Uz = _as_input(data, Uz)
    L0 = n_x_guess if L0 is None else L0
    L = L0 + 1
    target = (data.n_u + 1) * L + n_x_guess
    F = _stacked_F(data, L)
    svd = structured_svd(F[:, 0].real, F[:, 1:], tol_rel)
    if svd.rank < target:
        warnings.warn(
            f"data matrix has rank {svd.rank}, below the truncation target {target}",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    U1 = svd.U[:, :target]
    rhs = np.column_stack([_rhs(data, z, L, Uz=Uz), _rhs(data, z, L, transient=True)])
    Y, cond = _solve_on_basis(U1, data, z, L, rhs, tol_rel)
    return EvalResult(Y[:, 0], Y[:, 1], cond, L0)
