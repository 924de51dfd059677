"""Doubly dispersive (delay-Doppler) channel model.

A channel is a list of discrete paths, each with a complex gain, an
integer delay in samples, and a normalized Doppler shift nu = alpha + a
(alpha integer, a in (-1/2, 1/2]). Streaming application multiplies the
delayed transmit samples by the per-path Doppler phasor at the true time
index (prefix samples sit at negative time); the equivalent one-shot
matrix acting on the prefix-stripped block is

    H = sum_i h_i * G_i * D_i * Pi^l_i

with Pi the forward cyclic shift, D_i the Doppler phase diagonal and G_i
the diagonal prefix-phase correction, which collapses to the identity
whenever 2*N*c1 is an integer and N is even.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .daft import DaftParams
from .errors import ConfigurationError

__all__ = [
    "ChannelPath",
    "LtvChannel",
    "split_doppler",
    "apply_channel",
    "time_channel_matrix",
    "random_channel",
]


def split_doppler(nu: float) -> tuple[int, float]:
    """Split nu into (alpha, a) with integer alpha and a in (-1/2, 1/2]."""
    alpha = math.ceil(nu - 0.5)
    return alpha, nu - alpha


@dataclass(frozen=True)
class ChannelPath:
    """One propagation path: gain h, delay l (samples), Doppler nu (bins)."""

    gain: complex
    delay: int
    doppler: float

    def __post_init__(self):
        if self.delay < 0:
            raise ConfigurationError(f"negative delay {self.delay}")

    @property
    def doppler_int(self) -> int:
        return split_doppler(self.doppler)[0]

    @property
    def doppler_frac(self) -> float:
        return split_doppler(self.doppler)[1]


@dataclass(frozen=True)
class LtvChannel:
    """Immutable multipath channel over a length-n frame."""

    paths: tuple[ChannelPath, ...]
    n: int

    def __post_init__(self):
        if not self.paths:
            raise ConfigurationError("channel needs at least one path")
        if max(p.delay for p in self.paths) >= self.n:
            raise ConfigurationError("path delay must be below the frame length")

    @property
    def p_paths(self) -> int:
        return len(self.paths)

    @property
    def l_max(self) -> int:
        return max(p.delay for p in self.paths)

    def gains(self) -> np.ndarray:
        return np.array([p.gain for p in self.paths])

    def delays(self) -> np.ndarray:
        return np.array([p.delay for p in self.paths])

    def dopplers(self) -> np.ndarray:
        return np.array([p.doppler for p in self.paths])


def _prefix_phase(n: int, c1: float, l: int, t: np.ndarray) -> np.ndarray:
    """Diagonal of G_i: phase fixing up samples that wrapped from the prefix."""
    return np.where(t < l, np.exp(-2j * np.pi * c1 * (n * n - 2 * n * (l - t))), 1.0)


def apply_channel(s: np.ndarray, ch: LtvChannel, noise_var: float,
                  rng: np.random.Generator, l_cp: int | None = None) -> np.ndarray:
    """Propagate a prefix-extended frame and add complex white noise.

    s holds l_cp prefix samples followed by the n-sample body (possibly
    with leading batch axes); sample k sits at time k - l_cp. Samples
    delayed past the start of the prefix are taken as zero; they only
    affect the prefix part of the output, which the receiver discards.
    """
    s = np.asarray(s, dtype=complex)
    if l_cp is None:
        l_cp = s.shape[-1] - ch.n
    if l_cp < ch.l_max:
        raise ConfigurationError(
            f"prefix of {l_cp} samples shorter than the {ch.l_max}-tap delay spread")
    t = np.arange(-l_cp, ch.n)
    r = np.zeros_like(s)
    for p in ch.paths:
        shifted = np.zeros_like(s)
        if p.delay:
            shifted[..., p.delay:] = s[..., :-p.delay]
        else:
            shifted = s
        r = r + p.gain * np.exp(-2j * np.pi * (p.doppler / ch.n) * t) * shifted
    if noise_var > 0:
        w = rng.standard_normal(s.shape) + 1j * rng.standard_normal(s.shape)
        r = r + np.sqrt(noise_var / 2) * w
    return r


def time_channel_matrix(ch: LtvChannel, p: DaftParams) -> np.ndarray:
    """Dense n-by-n matrix mapping the transmitted body to the received body."""
    n = ch.n
    t = np.arange(n)
    H = np.zeros((n, n), dtype=complex)
    for path in ch.paths:
        phase = (path.gain
                 * np.exp(-2j * np.pi * (path.doppler / n) * t)
                 * _prefix_phase(n, p.c1, path.delay, t))
        H[t, (t - path.delay) % n] += phase
    return H


def random_channel(p_paths: int, l_max: int, alpha_max: int, doppler_mode: str,
                   rng: np.random.Generator, n: int, *,
                   delays: np.ndarray | None = None,
                   dopplers: np.ndarray | None = None,
                   gains: np.ndarray | None = None) -> LtvChannel:
    """Draw one channel realization.

    Gains are CN(0, 1/P) unless supplied. Delays default to the distinct
    taps 0..P-1 (requires P <= l_max + 1). Doppler per mode:

      integer-uniform  alpha_i uniform on {-alpha_max..alpha_max}
      jakes            nu_i = alpha_max * cos(theta), theta ~ U[-pi, pi]
      fixed            caller-supplied dopplers (and optionally delays/gains)
    """
    if p_paths < 1:
        raise ConfigurationError("need at least one path")
    if gains is None:
        g = rng.standard_normal(p_paths) + 1j * rng.standard_normal(p_paths)
        gains = g / np.sqrt(2 * p_paths)
    if delays is None:
        if p_paths > l_max + 1:
            raise ConfigurationError(
                f"{p_paths} distinct delays do not fit in 0..{l_max}")
        delays = np.arange(p_paths)
    if doppler_mode == "integer-uniform":
        dop = rng.integers(-alpha_max, alpha_max + 1, size=p_paths).astype(float)
    elif doppler_mode == "jakes":
        dop = alpha_max * np.cos(rng.uniform(-np.pi, np.pi, size=p_paths))
    elif doppler_mode == "fixed":
        if dopplers is None:
            raise ConfigurationError("fixed doppler mode needs explicit values")
        dop = np.asarray(dopplers, dtype=float)
        if dop.size != p_paths:
            raise ConfigurationError("doppler list length != path count")
    else:
        raise ConfigurationError(f"unknown doppler mode {doppler_mode!r}")
    paths = tuple(ChannelPath(complex(h), int(l), float(v))
                  for h, l, v in zip(gains, delays, dop))
    return LtvChannel(paths, n)
