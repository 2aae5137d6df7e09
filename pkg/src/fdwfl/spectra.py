"""Frequency grids, finite-record DFTs and the data matrices built from spectra.

A spectrum is stored on the half-circle grid ``omega[k] = pi * k / M`` for
``k = 0, ..., M-1`` only.  The conjugate half is implied by the realness of
the underlying time sequence and enters the data matrices through the
conjugated block of :func:`build_Psi`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

DEFAULT_TOL_REL = 1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    """Equidistant grid of ``M`` frequencies on ``[0, pi)``."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"grid size must be a positive integer, got {self.M!r}")

    @property
    def omega(self) -> np.ndarray:
        return np.pi * np.arange(self.M) / self.M

    @property
    def phasors(self) -> np.ndarray:
        """``exp(j * omega[k])`` for every grid index."""
        return np.exp(1j * self.omega)

    def phasor(self, k: int) -> complex:
        return complex(np.exp(1j * np.pi * k / self.M))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """``M`` complex vectors of length ``dim`` sampled on ``grid``.

    ``values`` has shape ``(M, dim)``; a 1-D array is read as ``dim == 1``.
    """

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] != self.grid.M:
            raise ValueError(
                f"spectrum values must have shape ({self.grid.M}, dim), got {values.shape}"
            )
        if values.shape[1] < 1:
            raise ValueError("spectrum dimension must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def M(self) -> int:
        return self.grid.M

    def __len__(self):
        return self.grid.M

    def __getitem__(self, k):
        return self.values[k]


@dataclass(frozen=True)
class PeReport:
    order: int
    rank: int
    required_rank: int
    singular_values: np.ndarray
    is_pe: bool


def make_grid(M: int) -> FrequencyGrid:
    return FrequencyGrid(M)


def phasor_spectrum(grid: FrequencyGrid) -> Spectrum:
    """The scalar spectrum ``Omega_k = exp(j * omega[k])``."""
    return Spectrum(grid, grid.phasors)


def stack_spectra(*spectra: Spectrum) -> Spectrum:
    """Concatenate spectra channel-wise, e.g. ``V = (U, Omega)``."""
    if not spectra:
        raise ValueError("nothing to stack")
    grid = spectra[0].grid
    for s in spectra[1:]:
        if s.grid != grid:
            raise ValueError("spectra live on different grids")
    return Spectrum(grid, np.hstack([s.values for s in spectra]))


def _as_samples(signal) -> np.ndarray:
    try:
        arr = np.asarray(signal, dtype=float)
    except ValueError as exc:
        raise ValueError("samples must all have the same dimension") from exc
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"signal must be a sequence of vectors, got shape {arr.shape}")
    return arr


def _dft_kernel(grid: FrequencyGrid, n_samples: int) -> np.ndarray:
    # exp(-j * pi * k * n / M); the exponent is reduced mod 2M in integers to
    # keep the phase exact for long records
    k = np.arange(grid.M)[:, None]
    n = np.arange(n_samples)[None, :]
    return np.exp(-1j * np.pi * ((k * n) % (2 * grid.M)) / grid.M)


def dft(signal, grid: FrequencyGrid) -> Spectrum:
    """Unnormalized DFT of a ``2M``-sample real record on ``grid``.

    ``S_k = sum_{n=0}^{2M-1} s_n exp(-j omega_k n)``, evaluated by direct
    summation.
    """
    s = _as_samples(signal)
    if s.shape[0] != 2 * grid.M:
        raise ValueError(f"expected {2 * grid.M} samples, got {s.shape[0]}")
    return Spectrum(grid, _dft_kernel(grid, s.shape[0]) @ s)


def record_dft(signal, grid: FrequencyGrid) -> Spectrum:
    """DFT of a record spanning a whole number of ``2M``-sample periods.

    Evaluated only at the frequencies of ``grid``, which are exact bins of
    the long record, so the boundary identity of :func:`dft` still holds.
    """
    s = _as_samples(signal)
    if s.shape[0] == 0 or s.shape[0] % (2 * grid.M):
        raise ValueError(
            f"record length {s.shape[0]} is not a positive multiple of {2 * grid.M}"
        )
    return Spectrum(grid, _dft_kernel(grid, s.shape[0]) @ s)


def inverse_dft(spectrum: Spectrum) -> np.ndarray:
    """Real ``2M``-sample period whose :func:`dft` is ``spectrum``.

    The full ``2M``-bin spectrum is completed by conjugate symmetry with the
    Nyquist bin set to zero and scaled by ``1/(2M)``.  The imaginary part of
    the DC bin cannot be represented by a real signal and is dropped.
    """
    M = spectrum.grid.M
    full = np.zeros((2 * M, spectrum.dim), dtype=complex)
    full[:M] = spectrum.values
    full[0] = full[0].real
    full[M + 1:] = np.conj(spectrum.values[1:][::-1])
    return np.fft.ifft(full, axis=0).real


def window_vector(z: complex, L: int) -> np.ndarray:
    """``[1, z, ..., z**(L-1)]``."""
    if L < 1:
        raise ValueError(f"window length must be positive, got {L}")
    return np.asarray(z, dtype=complex) ** np.arange(L)


def build_F(S: Spectrum, L: int, m: int = 0, n: Optional[int] = None) -> np.ndarray:
    """Columns ``W_L(exp(j omega_k)) kron S_k`` for ``k = m, ..., n`` (inclusive)."""
    if L < 1:
        raise ValueError(f"window length must be positive, got {L}")
    if n is None:
        n = S.M - 1
    if not 0 <= m <= n < S.M:
        raise ValueError(f"empty or out-of-range index range [{m}, {n}] for M={S.M}")
    ks = np.arange(m, n + 1)
    # W[i, k] = exp(j * omega_k * i), phase reduced mod 2M
    W = np.exp(1j * np.pi * ((np.arange(L)[:, None] * ks[None, :]) % (2 * S.M)) / S.M)
    block = W[:, None, :] * S.values[ks].T[None, :, :]
    return block.reshape(L * S.dim, ks.size)


def build_Psi(S: Spectrum, L: int) -> np.ndarray:
    """``[F_L(S[0:M]) | conj(F_L(S[1:M]))]``, shape ``(dim*L, 2M-1)``."""
    F = build_F(S, L)
    return np.hstack([F, np.conj(F[:, 1:])])


def realify_Psi(S: Spectrum, L: int) -> np.ndarray:
    """Real matrix ``[Re F_L(S[0:M]) | Im F_L(S[1:M])]`` with the same rank as Psi."""
    F = build_F(S, L)
    return np.hstack([F.real, F[:, 1:].imag])


def numerical_rank(matrix: np.ndarray, tol_rel: float = DEFAULT_TOL_REL):
    """Return ``(rank, singular_values)`` with rank = #{s > tol_rel * s_max}."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0, np.zeros(0)
    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0.0:
        return 0, s
    return int(np.count_nonzero(s > tol_rel * s[0])), s


def check_pe(S: Spectrum, L: int, tol_rel: float = DEFAULT_TOL_REL) -> PeReport:
    """Test whether ``S`` is persistently exciting of order ``L``.

    Orders beyond the counting bound ``dim * L <= 2M - 1`` are reported as not
    persistently exciting instead of raising.
    """
    required = S.dim * L
    if L < 1:
        return PeReport(L, 0, required, np.zeros(0), False)
    rank, s = numerical_rank(build_Psi(S, L), tol_rel)
    is_pe = rank == required and required <= 2 * S.M - 1
    return PeReport(L, rank, required, s, is_pe)
