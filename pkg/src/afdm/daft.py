"""Discrete affine Fourier transform (DAFT) core.

=================================================

The DAFT generalizes the DFT by quadratic-phase (chirp) factors on both
sides: in matrix form ``A = L_c2 @ F @ L_c1`` where ``F`` is the unitary
DFT matrix and ``L_c = diag(exp(-2j*pi*c*k^2))``. Both chirp rates are
free real parameters; ``c1 = c2 = 0`` recovers the plain DFT and
``c1 = c2 = 1/(2N)`` the Fresnel-like chirp transform used by OCDM.

Transforms are evaluated as chirp multiply, FFT, chirp multiply, which is
O(N log N) and matches the matrix factorization entrywise. All functions
accept stacked inputs (leading batch axes) and transform the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = [
    "DaftParams",
    "chirp_phase",
    "chirp_diag",
    "daft",
    "idaft",
    "daft_matrix",
    "subcarrier",
]


@dataclass(frozen=True)
class DaftParams:
    """Transform size and chirp rates.

    n : transform length N (>= 1)
    c1 : pre-DFT chirp rate (dimensionless)
    c2 : post-DFT chirp rate (dimensionless)
    """

    n: int
    c1: float = 0.0
    c2: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"transform length must be >= 1, got {self.n}")
        if not (np.isfinite(self.c1) and np.isfinite(self.c2)):
            raise ValueError("chirp rates must be finite")


def chirp_phase(c: float, n: int) -> np.ndarray:
    """Unit-modulus chirp vector exp(-2j*pi*c*k^2), k = 0..n-1."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * c * k * k)


def chirp_diag(c: float, n: int) -> np.ndarray:
    """Diagonal chirp matrix diag(exp(-2j*pi*c*k^2)); unitary for any c."""
    return np.diag(chirp_phase(c, n))


def _check_len(x: np.ndarray, p: DaftParams) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != p.n:
        raise DimensionError(f"expected last axis {p.n}, got {x.shape[-1]}")
    return x


def daft(x: np.ndarray, p: DaftParams) -> np.ndarray:
    """Forward transform S = A x with A = L_c2 F L_c1.

    S_m = (1/sqrt(N)) exp(-2j pi c2 m^2) sum_n exp(-2j pi (mn/N + c1 n^2)) x_n
    """
    x = _check_len(x, p)
    return chirp_phase(p.c2, p.n) * np.fft.fft(chirp_phase(p.c1, p.n) * x, norm="ortho")


def idaft(X: np.ndarray, p: DaftParams) -> np.ndarray:
    """Inverse transform s = A^H X; exact inverse of :func:`daft`."""
    X = _check_len(X, p)
    out = np.fft.ifft(np.conj(chirp_phase(p.c2, p.n)) * X, norm="ortho")
    return np.conj(chirp_phase(p.c1, p.n)) * out


def daft_matrix(p: DaftParams) -> np.ndarray:
    """Dense unitary transform matrix A.

    A[m, n] = (1/sqrt(N)) exp(-2j pi (c2 m^2 + mn/N + c1 n^2)).
    """
    k = np.arange(p.n)
    f = np.exp(-2j * np.pi * np.outer(k, k) / p.n) / np.sqrt(p.n)
    return chirp_phase(p.c2, p.n)[:, None] * f * chirp_phase(p.c1, p.n)[None, :]


def subcarrier(m: int, p: DaftParams) -> np.ndarray:
    """Time samples of the m-th chirp subcarrier.

    phi_m[n] = (1/sqrt(N)) exp(2j pi (c1 n^2 + c2 m^2 + nm/N)); the columns
    of A^H, forming an orthonormal basis.
    """
    n = np.arange(p.n)
    ph = p.c1 * n * n + p.c2 * m * m + n * m / p.n
    return np.exp(2j * np.pi * ph) / np.sqrt(p.n)
