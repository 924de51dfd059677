"""Frame detectors: exhaustive ML, exact LMMSE, and an iterative
decision-feedback equalizer built on per-symbol maximum-ratio combining.

The DFE sweeps the data symbols in order, combining each symbol's branch
observations from the current residual vector and immediately feeding the
refined estimate back. One sweep is a Gauss-Seidel pass over the
regularized normal equations, so the fixed point is the LMMSE solution
and convergence is governed by the spectral radius of the iteration
matrix, exposed here for diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .effective import EffectiveChannel
from .errors import CapacityError, ConfigurationError
from .modem import Alphabet, FrameLayout

__all__ = [
    "DfeConfig",
    "DetectionResult",
    "ml_detect",
    "ml_core",
    "lmmse_detect",
    "mrc_dfe_detect",
    "spectral_radius",
]

ML_BUDGET = 2 ** 24


@dataclass(frozen=True)
class DfeConfig:
    """DFE settings: linear SNR gamma, sweep cap, and stopping norm.

    epsilon = None scales the stop threshold with the data length as
    1e-6 * sqrt(n_data).
    """

    gamma: float
    n_iter: int = 20
    epsilon: float | None = None

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigurationError("gamma must be positive")
        if self.n_iter < 1:
            raise ConfigurationError("n_iter must be at least 1")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ConfigurationError("epsilon must be positive")


@dataclass(frozen=True)
class DetectionResult:
    symbols: np.ndarray
    hard: np.ndarray | None
    iterations_used: int
    op_count: int
    final_delta: float


def _snap(symbols: np.ndarray, a: Alphabet | None) -> np.ndarray | None:
    if a is None:
        return None
    idx = np.argmin(np.abs(symbols[..., None] - a.points[None, :]) ** 2, axis=-1)
    return a.points[idx]


def ml_detect(y: np.ndarray, heff: EffectiveChannel, a: Alphabet,
              layout: FrameLayout, budget: int = ML_BUDGET) -> np.ndarray:
    """Exhaustive search for the data vector minimizing ||y - H_eff x||^2.

    y must contain only the data contribution (any pilot already
    removed). Candidates are scored in lexicographic order over the
    alphabet and the first minimizer wins, so results are deterministic.
    """
    return ml_core(y, heff.dense[:, layout.data_index], a, budget)


def ml_core(y: np.ndarray, H: np.ndarray, a: Alphabet,
            budget: int = ML_BUDGET) -> np.ndarray:
    """ml_detect on an explicit N x n_data matrix of data columns."""
    n_data = H.shape[1]
    count = a.size ** n_data
    if count > budget:
        raise CapacityError(
            f"{a.size}^{n_data} = {count} candidates exceed the budget {budget}")
    y = np.asarray(y, dtype=complex)
    powers = a.size ** np.arange(n_data - 1, -1, -1, dtype=np.int64)
    best_score = np.inf
    best_idx = 0
    chunk = 1 << 16
    for start in range(0, count, chunk):
        idx = np.arange(start, min(start + chunk, count), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % a.size
        cand = a.points[digits]
        resid = cand @ H.T - y[None, :]
        scores = np.einsum("ij,ij->i", resid, np.conj(resid)).real
        k = int(np.argmin(scores))
        if scores[k] < best_score:
            best_score = float(scores[k])
            best_idx = int(idx[k])
    digits = (best_idx // powers) % a.size
    return a.points[digits]


def lmmse_detect(y: np.ndarray, banded: np.ndarray, gamma: float) -> np.ndarray:
    """Exact solve of (B^H B + gamma^-1 I) x = B^H y; batch axes allowed."""
    if gamma <= 0:
        raise ConfigurationError("gamma must be positive")
    B = np.asarray(banded, dtype=complex)
    y = np.asarray(y, dtype=complex)
    Bh = np.conj(np.swapaxes(B, -1, -2))
    G = Bh @ B
    n_data = G.shape[-1]
    G = G + np.eye(n_data) / gamma
    rhs = np.einsum("...ij,...j->...i", Bh, y)
    return np.linalg.solve(G, rhs[..., None])[..., 0]


def _column_support(banded: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray], int]:
    rows, vals = [], []
    L = 0
    for k in range(banded.shape[1]):
        r = np.nonzero(banded[:, k])[0]
        rows.append(r)
        vals.append(banded[r, k])
        L = max(L, r.size)
    return rows, vals, L


def mrc_dfe_detect(y: np.ndarray, banded: np.ndarray, cfg: DfeConfig,
                   alphabet: Alphabet | None = None) -> DetectionResult:
    """Iterative MRC-based DFE over the banded system.

    Each sweep updates symbols in index order: combine the residual
    against column k, add back the self term d * x_prev[k], scale by
    1/(d + gamma^-1), then fold the estimate change into the residual.
    The combining weight d is read off the first column once; it is
    column-independent for integer-Doppler channels.
    """
    B = np.asarray(banded, dtype=complex)
    n_data = B.shape[1]
    eps = cfg.epsilon if cfg.epsilon is not None else 1e-6 * np.sqrt(n_data)
    rows, vals, L = _column_support(B)
    d = float(np.sum(np.abs(vals[0]) ** 2)) if rows[0].size else 0.0
    denom = d + 1.0 / cfg.gamma
    x = np.zeros(n_data, dtype=complex)
    resid = np.asarray(y, dtype=complex).copy()
    iterations = cfg.n_iter
    delta = np.inf
    for it in range(1, cfg.n_iter + 1):
        x_prev = x.copy()
        for k in range(n_data):
            g = np.vdot(vals[k], resid[rows[k]]) + d * x[k]
            c = g / denom
            resid[rows[k]] -= vals[k] * (c - x[k])
            x[k] = c
        delta = float(np.linalg.norm(x - x_prev))
        if delta < eps:
            iterations = it
            break
    return DetectionResult(symbols=x, hard=_snap(x, alphabet),
                           iterations_used=iterations,
                           op_count=iterations * (5 * L + 1) * n_data,
                           final_delta=delta)


def _splitting(banded: np.ndarray, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    B = np.asarray(banded, dtype=complex)
    n_data = B.shape[1]
    R = np.conj(B.T) @ B + np.eye(n_data) / gamma
    d = float(np.sum(np.abs(B[:, 0]) ** 2))
    S = np.tril(np.conj(B.T) @ B, -1) + (d + 1.0 / gamma) * np.eye(n_data)
    return S, R


def spectral_radius(banded: np.ndarray, gamma: float,
                    method: str = "eig") -> float:
    """Spectral radius of the DFE iteration matrix -S^-1 (R - S)."""
    if gamma <= 0:
        raise ConfigurationError("gamma must be positive")
    S, R = _splitting(banded, gamma)
    M = np.linalg.solve(S, S - R)
    if method == "eig":
        return float(np.max(np.abs(np.linalg.eigvals(M))))
    if method == "power":
        rng = np.random.default_rng(0)
        v = rng.standard_normal(M.shape[0]) + 1j * rng.standard_normal(M.shape[0])
        v /= np.linalg.norm(v)
        est = 0.0
        M2 = M @ M
        for _ in range(2000):
            w = M2 @ v
            nw = np.linalg.norm(w)
            if nw == 0:
                return 0.0
            new = np.sqrt(nw)
            v = w / nw
            if abs(new - est) < 1e-9 * max(new, 1.0):
                return float(new)
            est = new
        return float(est)
    raise ConfigurationError(f"unknown method {method!r}")
