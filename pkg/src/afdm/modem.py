"""Symbol mapping, frame layout, and chirp-carrier modulation.

Frames live in the transform domain: a frame vector x of length N holds
data symbols plus optional nulls and an optional pilot, is modulated to
time-domain samples s = A^H x, extended by a chirp-periodic prefix, and
demodulated back with y = A r after the prefix is stripped.

Constellations are Gray-labeled with unit average energy. Baseline
waveforms are parameter specializations of the same chain: (c1, c2) =
(0, 0) is OFDM, (1/(2N), 1/(2N)) is OCDM.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .daft import DaftParams, daft, idaft
from .errors import ConfigurationError, DimensionError

__all__ = [
    "Alphabet",
    "ALPHABETS",
    "FrameLayout",
    "map_bits",
    "demap_bits",
    "build_frame",
    "extract_data",
    "modulate",
    "demodulate",
    "add_cpp",
    "strip_cpp",
    "cpp_phase",
]


# ---------------------------------------------------------------------------
# constellations
# ---------------------------------------------------------------------------

def _gray_pam(bits: np.ndarray) -> np.ndarray:
    # 2-bit Gray ramp 00,01,11,10 -> -3,-1,+1,+3
    b0, b1 = bits[..., 0], bits[..., 1]
    return (2 * b0 - 1) * (3 - 2 * b1)


@dataclass(frozen=True)
class Alphabet:
    """Gray-labeled constellation with unit mean symbol energy.

    points[i] is the symbol whose label is the bits of i, most significant
    bit first. ``scale`` keeps the integer lattice separate so the unit
    energy property is exact by construction.
    """

    kind: str
    bits_per_symbol: int
    points: np.ndarray
    scale: float

    @property
    def size(self) -> int:
        return self.points.size

    def bit_labels(self) -> np.ndarray:
        """(size, bits_per_symbol) int array; row i = bits of index i."""
        idx = np.arange(self.size)
        shifts = np.arange(self.bits_per_symbol - 1, -1, -1)
        return (idx[:, None] >> shifts[None, :]) & 1


def _make_alphabets() -> dict[str, Alphabet]:
    out = {}

    pts = np.array([1.0, -1.0], dtype=complex)
    out["bpsk"] = Alphabet("bpsk", 1, pts, 1.0)

    lab = ((np.arange(4)[:, None] >> np.arange(1, -1, -1)[None, :]) & 1)
    re = 1.0 - 2.0 * lab[:, 0]
    im = 1.0 - 2.0 * lab[:, 1]
    out["qpsk"] = Alphabet("qpsk", 2, (re + 1j * im) / np.sqrt(2.0), 1 / np.sqrt(2.0))

    lab = ((np.arange(16)[:, None] >> np.arange(3, -1, -1)[None, :]) & 1)
    re = _gray_pam(lab[:, 0:2])
    im = _gray_pam(lab[:, 2:4])
    out["16qam"] = Alphabet("16qam", 4, (re + 1j * im) / np.sqrt(10.0), 1 / np.sqrt(10.0))

    return out


ALPHABETS = _make_alphabets()


def map_bits(bits: np.ndarray, a: Alphabet) -> np.ndarray:
    """Bits (last axis, length divisible by bits_per_symbol) to symbols."""
    bits = np.asarray(bits)
    if bits.shape[-1] % a.bits_per_symbol:
        raise DimensionError(
            f"bit count {bits.shape[-1]} not divisible by {a.bits_per_symbol}")
    grp = bits.reshape(*bits.shape[:-1], -1, a.bits_per_symbol)
    shifts = np.arange(a.bits_per_symbol - 1, -1, -1)
    idx = (grp << shifts).sum(axis=-1)
    return a.points[idx]


def demap_bits(symbols: np.ndarray, a: Alphabet) -> np.ndarray:
    """Hard decision: nearest constellation point, then its bit label."""
    symbols = np.asarray(symbols)
    d2 = np.abs(symbols[..., None] - a.points) ** 2
    idx = d2.argmin(axis=-1)
    return a.bit_labels()[idx].reshape(*symbols.shape[:-1], -1)


# ---------------------------------------------------------------------------
# frame layout
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrameLayout:
    """Positions of data, nulls, and the optional pilot inside a frame.

    variant:
      data-only      all N positions carry data.
      zero-padded    Q nulls placed so the data columns of the effective
                     channel form a band with no modular wrap: data occupies
                     [Q-m, N-m) with m = alpha_max + xi_nu.
      embedded-pilot pilot at 0, nulls at 1..Q and N-Q..N-1, data between.
    """

    variant: str
    n: int
    q: int = 0
    guard_halfwidth: int = 0  # alpha_max + xi_nu, written m below
    pilot_index: int | None = None
    data_index: np.ndarray = field(repr=False, default=None)

    @staticmethod
    def data_only(n: int) -> "FrameLayout":
        return FrameLayout("data-only", n, 0, 0, None, np.arange(n))

    @staticmethod
    def zero_padded(n: int, q: int, guard_halfwidth: int) -> "FrameLayout":
        m = guard_halfwidth
        if not 0 <= m <= q or q >= n:
            raise ConfigurationError(f"invalid guard split q={q}, m={m}, n={n}")
        return FrameLayout("zero-padded", n, q, m, None, np.arange(q - m, n - m))

    @staticmethod
    def embedded_pilot(n: int, q: int, guard_halfwidth: int) -> "FrameLayout":
        if 2 * q + 1 >= n:
            raise ConfigurationError(f"no data capacity: n={n}, q={q}")
        # nulls at 1..q and n-q..n-1; data strictly between the guard bands
        return FrameLayout("embedded-pilot", n, q, guard_halfwidth, 0,
                           np.arange(q + 1, n - q))

    @property
    def data_capacity(self) -> int:
        return self.data_index.size


def build_frame(data: np.ndarray, layout: FrameLayout, pilot: complex = 0.0) -> np.ndarray:
    """Assemble frame vector(s) from data symbols per the layout.

    data may carry leading batch axes; the last axis must equal the
    layout's data capacity.
    """
    data = np.asarray(data, dtype=complex)
    if data.shape[-1] != layout.data_capacity:
        raise DimensionError(
            f"layout holds {layout.data_capacity} data symbols, got {data.shape[-1]}")
    x = np.zeros(data.shape[:-1] + (layout.n,), dtype=complex)
    x[..., layout.data_index] = data
    if layout.pilot_index is not None:
        x[..., layout.pilot_index] = pilot
    return x


def extract_data(frame: np.ndarray, layout: FrameLayout) -> np.ndarray:
    """Pull the data positions back out of a frame-sized vector."""
    return np.asarray(frame)[..., layout.data_index]


# ---------------------------------------------------------------------------
# modulation and prefix
# ---------------------------------------------------------------------------

def modulate(x: np.ndarray, p: DaftParams) -> np.ndarray:
    """Frame to time samples, s = A^H x."""
    return idaft(x, p)


def demodulate(r: np.ndarray, p: DaftParams) -> np.ndarray:
    """Prefix-stripped time samples back to the transform domain, y = A r."""
    return daft(r, p)


def cpp_phase(n: int, l_cp: int, c1: float) -> np.ndarray:
    """Phase factors applied to the copied tail, one per prefix sample.

    Prefix sample at time n0 = -l_cp..-1 equals
    s[N + n0] * exp(-2j pi c1 (N^2 + 2 N n0)); reduces to all ones (a plain
    cyclic prefix) when 2*N*c1 is an integer and N is even.
    """
    n0 = np.arange(-l_cp, 0)
    return np.exp(-2j * np.pi * c1 * (n * n + 2 * n * n0))


def add_cpp(s: np.ndarray, l_cp: int, c1: float) -> np.ndarray:
    """Prepend the chirp-periodic prefix; output length N + l_cp."""
    s = np.asarray(s)
    n = s.shape[-1]
    if not 0 <= l_cp < n:
        raise ConfigurationError(f"prefix length {l_cp} outside [0, {n})")
    if l_cp == 0:
        return s.astype(complex, copy=True)
    pre = s[..., n - l_cp:] * cpp_phase(n, l_cp, c1)
    return np.concatenate([pre, s], axis=-1)


def strip_cpp(r: np.ndarray, l_cp: int) -> np.ndarray:
    """Drop the first l_cp received samples."""
    return np.asarray(r)[..., l_cp:]
