"""Diversity analysis via the per-path response of codeword differences.

Stacking H_i * delta for each path gives a matrix whose minimum rank
over all non-zero codeword differences is the diversity order the
channel family can extract; the same singular values bound the pairwise
error probability. Rank experiments here are the numerical counterpart
of the separability condition on c1.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .channel import LtvChannel
from .daft import DaftParams
from .effective import heff_entries
from .errors import DimensionError
from .modem import Alphabet

__all__ = ["phi_matrix", "min_rank_over_deltas", "pep_bound", "PepBound"]

RANK_TOL = 1e-8


def _unit_path_mats(ch: LtvChannel, p: DaftParams) -> np.ndarray:
    """(P, N, N) stack of gain-free per-path effective matrices."""
    return np.stack([heff_entries(q, p, k_nu=p.n).to_dense() for q in ch.paths])


def phi_matrix(delta: np.ndarray, ch: LtvChannel, p: DaftParams) -> np.ndarray:
    """N x P matrix whose column i is H_i applied to the difference vector."""
    delta = np.asarray(delta, dtype=complex)
    if delta.shape != (p.n,):
        raise DimensionError(f"delta must have shape ({p.n},)")
    return (_unit_path_mats(ch, p) @ delta).T


def _ranks(phis: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(phis, compute_uv=False)
    return np.sum(s > RANK_TOL * s[..., :1], axis=-1)


def min_rank_over_deltas(ch: LtvChannel, p: DaftParams, a: Alphabet,
                         budget: int = 10_000, seed: int = 0) -> int:
    """Minimum rank of the difference response over codeword differences.

    Enumerates every delta when the difference alphabet fits the budget,
    otherwise scores `budget` random non-zero differences.
    """
    diffs = np.unique(np.round(
        (a.points[:, None] - a.points[None, :]).ravel(), 12))
    mats = _unit_path_mats(ch, p)
    d = diffs.size
    best = mats.shape[0]
    if d ** p.n <= budget:
        count = d ** p.n
        powers = d ** np.arange(p.n - 1, -1, -1, dtype=np.int64)
        idx = np.arange(count, dtype=np.int64)
        deltas = diffs[(idx[:, None] // powers[None, :]) % d]
        deltas = deltas[np.any(deltas != 0, axis=1)]
    else:
        rng = np.random.default_rng(seed)
        pick = rng.integers(0, a.size, size=(budget, 2, p.n))
        deltas = a.points[pick[:, 0]] - a.points[pick[:, 1]]
        deltas = deltas[np.any(np.abs(deltas) > 1e-12, axis=1)]
    chunk = 4096
    for start in range(0, deltas.shape[0], chunk):
        block = deltas[start:start + chunk]
        phis = np.einsum("pnm,cm->cnp", mats, block)
        best = min(best, int(np.min(_ranks(phis))))
        if best == 1:
            break
    return best


class PepBound(NamedTuple):
    bound: float
    high_snr: float
    rank: int


def pep_bound(delta: np.ndarray, ch: LtvChannel, p: DaftParams,
              n0: float) -> PepBound:
    """Pairwise error bound prod 1/(1 + s_l^2/(4 P N0)) and its high-SNR form."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    phi = phi_matrix(delta, ch, p)
    s = np.linalg.svd(phi, compute_uv=False)
    p_paths = ch.p_paths
    bound = float(np.prod(1.0 / (1.0 + s ** 2 / (4 * p_paths * n0))))
    keep = s > RANK_TOL * s[0]
    high = float(np.prod(4 * p_paths * n0 / s[keep] ** 2))
    return PepBound(bound=bound, high_snr=high, rank=int(keep.sum()))
