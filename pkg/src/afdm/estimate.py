"""Embedded-pilot channel estimation.

A unit frame carries one pilot at index 0 ringed by Q nulls on each
side, so a window of Q+1 received samples depends on the pilot alone.
Integer Doppler puts each path's pilot response at a distinct window
sample, making estimation a peak search plus an index inversion.
Fractional Doppler spreads the responses; estimation then runs in three
phases: greedy delay/integer-Doppler selection under the orthogonality
approximation, per-path grid refinement of the fractional part with the
other paths' current contributions subtracted, and a final joint linear
solve for the gains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import split_doppler
from .daft import DaftParams
from .effective import _two_nc1
from .errors import ConfigurationError, EstimationError
from .modem import FrameLayout

__all__ = [
    "PathEstimate",
    "EstimationWindow",
    "extract_window",
    "pilot_column",
    "estimate_integer",
    "estimate_fractional",
]


@dataclass(frozen=True)
class PathEstimate:
    delay: int
    doppler_int: int
    doppler_frac: float
    gain: complex

    @property
    def doppler(self) -> float:
        return self.doppler_int + self.doppler_frac


@dataclass(frozen=True)
class EstimationWindow:
    """Pilot-only view of a received frame.

    t_tx indexes the transmit-side pilot+null region, t_rx the receive
    samples that region can reach; y_e holds those samples.
    """

    y_e: np.ndarray
    x_pilot: complex
    t_tx: np.ndarray
    t_rx: np.ndarray
    params: DaftParams

    @property
    def size(self) -> int:
        return self.t_rx.size


def window_indices(n: int, q: int, alpha_max: int,
                   xi_nu: int) -> tuple[np.ndarray, np.ndarray]:
    m = alpha_max + xi_nu
    t_tx = np.concatenate([np.arange(q + 1), np.arange(n - q, n)])
    t_rx = np.concatenate([np.arange(m + 1), np.arange(n - q + m, n)])
    return t_tx, t_rx


def extract_window(y: np.ndarray, layout: FrameLayout, alpha_max: int,
                   xi_nu: int, p: DaftParams,
                   x_pilot: complex = 1.0 + 0.0j) -> EstimationWindow:
    if layout.variant != "embedded-pilot":
        raise ConfigurationError(f"layout {layout.variant!r} carries no pilot")
    t_tx, t_rx = window_indices(layout.n, layout.q, alpha_max, xi_nu)
    y = np.asarray(y, dtype=complex)
    return EstimationWindow(y_e=y[..., t_rx], x_pilot=complex(x_pilot),
                            t_tx=t_tx, t_rx=t_rx, params=p)


def pilot_column(l: int, nu: float, p: DaftParams,
                 window: EstimationWindow) -> np.ndarray:
    """Unit-gain pilot response of a (delay, Doppler) hypothesis.

    Column 0 of the path's effective matrix restricted to the window
    rows, from the same closed form as heff_entries.
    """
    n = p.n
    rows = window.t_rx
    shift = _two_nc1(p)
    x = rows + nu + shift * l
    den = np.exp(-2j * np.pi * x / n) - 1.0
    num = np.exp(-2j * np.pi * x) - 1.0
    peak = np.abs(den) < 1e-12
    ratio = np.where(peak, n, np.divide(num, np.where(peak, 1.0, den)))
    phase = np.exp(2j * np.pi / n * (n * p.c1 * l * l - n * p.c2 * rows ** 2))
    return phase * ratio / n


def _invert_loc(loc: int, l_max: int, alpha_max: int, stride: int,
                n: int) -> tuple[int, int]:
    """Invert loc = (alpha + stride*l) mod n on the admissible grid.

    stride is 2*N*c1 from the design rule; it exceeds 2*alpha_max when the
    chirp rate was sized for fractional spread, leaving unmapped gaps."""
    val = loc if loc <= l_max * stride + alpha_max else loc - n
    l = (val + alpha_max) // stride
    alpha = val - stride * l
    if not (0 <= l <= l_max and abs(alpha) <= alpha_max):
        raise EstimationError(
            f"window peak at shift {loc} maps outside the delay-Doppler grid")
    return l, alpha


def estimate_integer(w: EstimationWindow, p_paths: int, l_max: int,
                     alpha_max: int) -> list[PathEstimate]:
    """Peak-pick the P strongest window samples and invert their shifts."""
    order = np.argsort(-np.abs(w.y_e), kind="stable")[:p_paths]
    p = w.params
    stride = _two_nc1(p)
    out = []
    for pos in order:
        row = int(w.t_rx[pos])
        loc = (-row) % p.n
        l, alpha = _invert_loc(loc, l_max, alpha_max, stride, p.n)
        col = pilot_column(l, float(alpha), p, w)
        gain = np.vdot(col, w.y_e) / w.x_pilot
        out.append(PathEstimate(delay=l, doppler_int=alpha, doppler_frac=0.0,
                                gain=complex(gain)))
    out.sort(key=lambda e: (e.delay, e.doppler_int))
    return out


def _grid_columns(w: EstimationWindow, l_max: int,
                  alpha_max: int) -> tuple[list[tuple[int, int]], np.ndarray]:
    pairs = [(l, a) for l in range(l_max + 1)
             for a in range(-alpha_max, alpha_max + 1)]
    cols = np.stack([pilot_column(l, float(a), w.params, w) for l, a in pairs],
                    axis=1)
    return pairs, cols


def _solve_gains(cols: np.ndarray, y_e: np.ndarray) -> np.ndarray:
    G = np.conj(cols.T) @ cols
    if np.linalg.cond(G) > 1e12:
        raise EstimationError("pilot responses are numerically dependent")
    return np.linalg.solve(G, np.conj(cols.T) @ y_e)


def estimate_fractional(w: EstimationWindow, p_paths: int, l_max: int,
                        alpha_max: int,
                        grid_resolution: float = 1 / 64) -> list[PathEstimate]:
    """Three-phase approximate-ML search for fractional-Doppler paths.

    Assumes the paths occupy distinct delays. Phase 2 re-scans each
    path's fractional offset with the other paths' reconstructions
    subtracted, cycling three times so early coarse picks get revisited.
    """
    p = w.params
    pairs, grid = _grid_columns(w, l_max, alpha_max)
    energies = np.sum(np.abs(grid) ** 2, axis=0).real
    chosen: list[tuple[int, int]] = []
    resid = w.y_e.copy()
    for _ in range(p_paths):
        scores = np.abs(np.conj(grid.T) @ resid) ** 2 / energies
        used = {l for l, _ in chosen}
        scores[[i for i, (l, _) in enumerate(pairs) if l in used]] = -1.0
        best = int(np.argmax(scores))
        chosen.append(pairs[best])
        cols = np.stack([grid[:, pairs.index(c)] for c in chosen], axis=1)
        resid = w.y_e - cols @ _solve_gains(cols, w.y_e)

    nus = [float(a) for _, a in chosen]
    delays = [l for l, _ in chosen]
    a_grid = np.arange(round(-0.5 / grid_resolution),
                       round(0.5 / grid_resolution) + 1) * grid_resolution
    cols = np.stack([pilot_column(delays[i], nus[i], p, w)
                     for i in range(p_paths)], axis=1)
    amps = _solve_gains(cols, w.y_e)
    for _ in range(3):
        for i in range(p_paths):
            others = cols @ amps - cols[:, i] * amps[i]
            ri = w.y_e - others
            alpha_i = chosen[i][1]
            cand = np.stack([pilot_column(delays[i], alpha_i + a, p, w)
                             for a in a_grid], axis=1)
            en = np.sum(np.abs(cand) ** 2, axis=0).real
            scores = np.abs(np.conj(cand.T) @ ri) ** 2 / en
            best = int(np.argmax(scores))
            nus[i] = alpha_i + float(a_grid[best])
            cols[:, i] = cand[:, best]
            amps[i] = np.vdot(cols[:, i], ri) / en[best]
    amps = _solve_gains(cols, w.y_e)
    out = []
    for i in range(p_paths):
        alpha, frac = split_doppler(nus[i])
        out.append(PathEstimate(delay=delays[i], doppler_int=alpha,
                                doppler_frac=frac,
                                gain=complex(amps[i] / w.x_pilot)))
    out.sort(key=lambda e: e.delay)
    return out
