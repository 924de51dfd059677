"""Effective channel in the chirp-transform domain.

Conjugating the time-domain channel by the transform matrix gives
H_eff = A H A^H. Each path contributes a matrix whose rows hold a short
circular band of coefficients centered at column (p + loc) mod N, where
loc folds the path's integer Doppler and delay into a single shift. For
purely integer Doppler the band collapses to one unit-modulus entry per
row, so paths land in disjoint quasi-diagonals whenever the chirp rate
c1 is picked from the non-overlap rule. Everything here is closed form;
no transform of the dense matrix is needed to locate or evaluate the
non-zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelPath, LtvChannel, split_doppler
from .daft import DaftParams, chirp_phase
from .errors import ConfigurationError
from .modem import FrameLayout

__all__ = [
    "PathEntries",
    "EffectiveChannel",
    "heff_from_time",
    "heff_entries",
    "path_loc",
    "choose_c1",
    "choose_c2",
    "check_separability",
    "guard_count",
    "fractional_envelope",
    "default_k_nu",
    "effective_channel",
    "band_truncate",
]

_INT_TOL = 1e-9


def heff_from_time(H: np.ndarray, p: DaftParams) -> np.ndarray:
    """Conjugate a time-domain channel matrix into the transform domain."""
    H = np.asarray(H, dtype=complex)
    if H.shape[-2:] != (p.n, p.n):
        raise ConfigurationError(f"expected trailing shape {(p.n, p.n)}, got {H.shape}")
    lam1 = chirp_phase(p.c1, p.n)
    lam2 = chirp_phase(p.c2, p.n)
    M = lam1[:, None] * H * np.conj(lam1)[None, :]
    G = np.fft.ifft(np.fft.fft(M, axis=-2, norm="ortho"), axis=-1, norm="ortho")
    return lam2[:, None] * G * np.conj(lam2)[None, :]


def _two_nc1(p: DaftParams) -> int:
    v = 2 * p.n * p.c1
    r = round(v)
    if abs(v - r) > _INT_TOL:
        raise ConfigurationError(f"2*N*c1 = {v} is not an integer; pick c1 = odd/(2N)")
    return r


def path_loc(alpha: int, l: int, p: DaftParams) -> int:
    """Column shift (alpha + 2*N*c1*l) mod N of a path's band center."""
    return (alpha + _two_nc1(p) * l) % p.n


def choose_c1(alpha_max: int, xi_nu: int, n: int, fractional: bool) -> float:
    """Chirp rate making distinct (delay, Doppler) pairs non-overlapping."""
    if alpha_max < 0 or xi_nu < 0:
        raise ConfigurationError("alpha_max and xi_nu must be non-negative")
    spread = alpha_max + (xi_nu if fractional else 0)
    return (2 * spread + 1) / (2 * n)


def choose_c2(n: int, mode: str = "irrational") -> float:
    if mode == "irrational":
        return 1.0 / (2 * n * math.pi)
    if mode == "small-rational":
        return 1.0 / (4 * n * n)
    raise ConfigurationError(f"unknown c2 mode {mode!r}")


def check_separability(l_max: int, alpha_max: int, k_nu: int, n: int) -> bool:
    """True when every path maps to its own band of columns (k_nu=0: integer)."""
    s = alpha_max + k_nu
    return 2 * s * l_max + 2 * s + l_max < n


def guard_count(l_max: int, alpha_max: int, xi_nu: int) -> int:
    """Null symbols needed to keep data free of inter-frame leakage."""
    return (l_max + 1) * (2 * (alpha_max + xi_nu) + 1) - 1


def fractional_envelope(offset: int, n: int) -> float:
    """Upper bound on |H_i[p,q]| at circular column offset >= that value.

    Worst case over the fractional part a in (-1/2, 1/2], so usable as a
    truncation threshold without knowing the realized Doppler.
    """
    theta = np.pi * max(abs(offset) - 0.5, 0.0) / n
    return (n - 1) / n * abs(math.cos(theta)) + 1.0 / n


def default_k_nu(n: int, threshold: float = 0.02) -> int:
    """Smallest half-width whose first excluded offset falls below threshold.

    The envelope floors at 1/n, so for small frames no width satisfies a
    2% threshold; the search is capped at (n-1)//2 (the whole circle).
    """
    cap = (n - 1) // 2
    for k in range(cap):
        if fractional_envelope(k + 1, n) < threshold:
            return k
    return cap


@dataclass(frozen=True)
class PathEntries:
    """Unit-gain sparse band of one path: row p holds coeffs[p, j] at
    column (p + loc + offsets[j]) mod N."""

    loc: int
    offsets: np.ndarray
    coeffs: np.ndarray

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def width(self) -> int:
        return self.offsets.size

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.n, self.n), dtype=complex)
        rows = np.arange(self.n)[:, None]
        cols = (rows + self.loc + self.offsets[None, :]) % self.n
        H[rows, cols] = self.coeffs
        return H


def heff_entries(path: ChannelPath, p: DaftParams,
                 k_nu: int | None = None) -> PathEntries:
    """Closed-form non-zeros of one path's effective matrix (gain excluded).

    Integer Doppler gives a single unit-modulus entry per row; fractional
    Doppler spreads over a circular band of half-width k_nu (default from
    default_k_nu), evaluated via the geometric-sum ratio.
    """
    n = p.n
    l = path.delay
    alpha, a = split_doppler(path.doppler)
    shift = _two_nc1(p)
    loc = (alpha + shift * l) % n
    integer = abs(a) < 1e-12
    if integer:
        offsets = np.zeros(1, dtype=int)
    else:
        if k_nu is None:
            k_nu = default_k_nu(n)
        if 2 * k_nu + 1 >= n:
            offsets = np.arange(n) - n // 2
        else:
            offsets = np.arange(-k_nu, k_nu + 1)
    rows = np.arange(n)[:, None]
    cols = (rows + loc + offsets[None, :]) % n
    x = rows - cols + path.doppler + shift * l
    den = np.exp(-2j * np.pi * x / n) - 1.0
    num = np.exp(-2j * np.pi * x) - 1.0
    peak = np.abs(den) < 1e-12
    ratio = np.where(peak, n, np.divide(num, np.where(peak, 1.0, den)))
    phase = np.exp(2j * np.pi / n
                   * (n * p.c1 * l * l - cols * l + n * p.c2 * (cols ** 2 - rows ** 2)))
    return PathEntries(loc=loc, offsets=offsets, coeffs=phase * ratio / n)


@dataclass(frozen=True)
class EffectiveChannel:
    """Dense effective matrix plus its per-path sparse description."""

    dense: np.ndarray
    per_path: tuple[PathEntries, ...]
    params: DaftParams
    channel: LtvChannel
    alpha_max: int
    l_max: int
    k_nu: int
    xi_nu: int

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def spread(self) -> int:
        """Half-width m of the per-column band used by truncation."""
        return self.alpha_max + self.xi_nu

    @property
    def q(self) -> int:
        return guard_count(self.l_max, self.alpha_max, self.xi_nu)


def effective_channel(ch: LtvChannel, p: DaftParams, alpha_max: int,
                      xi_nu: int = 0, k_nu: int | None = None,
                      l_max: int | None = None) -> EffectiveChannel:
    """Build the effective channel for one realization.

    alpha_max and l_max describe the design-time spread (guards and c1
    are sized for them), not the realized paths; l_max defaults to the
    realization's longest delay.
    """
    from .channel import time_channel_matrix

    if l_max is None:
        l_max = ch.l_max
    if ch.l_max > l_max:
        raise ConfigurationError("realized delay exceeds the design spread")
    integer = all(abs(split_doppler(q.doppler)[1]) < 1e-12 for q in ch.paths)
    if k_nu is None:
        k_nu = 0 if integer else default_k_nu(p.n)
    if not 0 <= xi_nu <= max(k_nu, 0):
        raise ConfigurationError(f"xi_nu = {xi_nu} outside [0, k_nu = {k_nu}]")
    dense = heff_from_time(time_channel_matrix(ch, p), p)
    per_path = tuple(heff_entries(q, p, k_nu=k_nu) for q in ch.paths)
    return EffectiveChannel(dense=dense, per_path=per_path, params=p, channel=ch,
                            alpha_max=alpha_max, l_max=l_max, k_nu=k_nu, xi_nu=xi_nu)


def band_truncate(heff: EffectiveChannel,
                  layout: FrameLayout | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Columns of the effective matrix that data symbols actually excite.

    Returns (data index map, N x (N-Q) matrix). Entries outside every
    path's +/- xi_nu circular band are zeroed, leaving per column P
    non-zeros in the integer case and (2*xi_nu+1)*P in the fractional
    case. Requires the frame to reserve at least Q nulls.
    """
    n, q_guard = heff.n, heff.q
    if layout is None:
        layout = FrameLayout.zero_padded(n, q_guard, heff.spread)
    if n - layout.data_index.size < q_guard:
        raise ConfigurationError(
            f"layout reserves {n - layout.data_index.size} nulls, needs {q_guard}")
    rows = np.arange(n)[:, None]
    cols = np.arange(n)[None, :]
    mask = np.zeros((n, n), dtype=bool)
    for pe in heff.per_path:
        d = (cols - rows - pe.loc) % n
        mask |= np.minimum(d, n - d) <= heff.xi_nu
    banded = np.where(mask, heff.dense, 0.0)[:, layout.data_index]
    return layout.data_index, banded
