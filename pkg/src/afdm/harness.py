"""Monte-Carlo link experiments: BER sweeps, estimation quality runs,
and DFE convergence reports, with CSV persistence.

Trials run in fixed-size blocks. Each block derives its channel and bit
streams from SeedSequence([seed, block]) and its noise from
SeedSequence([seed, block, point]), so results are reproducible, blocks
can run in any order or on any worker, and all SNR points of a sweep
see the same channel/bit realizations (common random numbers). Block
size is a pure function of the frame length, never of worker count.

The heavy math is vectorized across the trials of a block: frames,
chirp-periodic prefixes, time-varying channel application, and effective
matrices are all built batched, and BPSK ML detection scores every
candidate frame for a whole chunk of trials with one matrix product.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import split_doppler
from .config import SimConfig, config_hash
from .daft import DaftParams, chirp_phase
from .detect import DfeConfig, lmmse_detect, ml_core, mrc_dfe_detect, spectral_radius
from .effective import _two_nc1
from .errors import ConfigurationError, EstimationError, InsufficientDataError
from .estimate import EstimationWindow, estimate_fractional, estimate_integer, \
    window_indices
from .modem import Alphabet, FrameLayout, add_cpp, build_frame, demap_bits, \
    demodulate, map_bits, modulate, strip_cpp

__all__ = [
    "BerRecord",
    "EstRecord",
    "ConvergenceRow",
    "run_ber_sweep",
    "run_estimation_trials",
    "run_convergence_report",
    "estimate_diversity_slope",
    "write_ber_csv",
    "read_ber_csv",
    "write_est_csv",
    "block_size",
    "worker_count",
    "BER_HEADER",
    "EST_HEADER",
]

BER_HEADER = "config_hash,waveform,detector,snr_db,trials,bit_errors,ber,wall_ms"
EST_HEADER = "config_hash,mode,snr_p_db,trials,exact_rate,gain_nmse_db,wall_ms"


@dataclass(frozen=True)
class BerRecord:
    config_hash: str
    waveform: str
    detector: str
    snr_db: float
    trials: int
    bit_errors: int
    ber: float
    wall_ms: float


@dataclass(frozen=True)
class EstRecord:
    config_hash: str
    mode: str
    snr_p_db: float
    trials: int
    exact_rate: float
    gain_nmse_db: float
    wall_ms: float


class ConvergenceRow(NamedTuple):
    channel_id: int
    rho: float
    iterations: int
    final_delta: float


def block_size(n: int) -> int:
    """Trials per RNG block; bounded so batch arrays stay cache-friendly."""
    return min(8192, max(64, 2 ** 23 // (n * n)))


def worker_count(explicit: int | None = None) -> int:
    w = explicit if explicit is not None else int(os.environ.get("AFDM_WORKERS", "1"))
    if w < 1:
        raise ConfigurationError("worker count must be at least 1")
    return w


def _rng_common(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, block]))


def _rng_noise(seed: int, block: int, point: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, block, point]))


def _draw_channels(cfg: SimConfig, rng: np.random.Generator,
                   count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-trial path gains and Dopplers; delays fixed at 0..P-1."""
    pp = cfg.p_paths
    if cfg.gains is not None:
        gains = np.broadcast_to(np.asarray(cfg.gains, dtype=complex), (count, pp))
    else:
        g = rng.standard_normal((count, pp)) + 1j * rng.standard_normal((count, pp))
        gains = g / np.sqrt(2 * pp)
    delays = np.arange(pp)
    if cfg.doppler_mode == "integer-uniform":
        dops = rng.integers(-cfg.alpha_max, cfg.alpha_max + 1,
                            size=(count, pp)).astype(float)
    elif cfg.doppler_mode == "jakes":
        dops = cfg.alpha_max * np.cos(rng.uniform(-np.pi, np.pi, size=(count, pp)))
    else:
        dops = np.broadcast_to(np.asarray(cfg.dopplers, dtype=float), (count, pp))
    return gains, delays, dops


def _apply_paths(tx: np.ndarray, gains: np.ndarray, delays: np.ndarray,
                 dops: np.ndarray, n: int, l_cp: int) -> np.ndarray:
    """Batched time-domain channel: sample k of tx sits at time k - l_cp."""
    t = np.arange(-l_cp, n)
    r = np.zeros_like(tx)
    for i, d in enumerate(delays):
        if d:
            shifted = np.zeros_like(tx)
            shifted[..., d:] = tx[..., :-d]
        else:
            shifted = tx
        phase = np.exp(-2j * np.pi * (dops[:, i:i + 1] / n) * t[None, :])
        r = r + gains[:, i:i + 1] * phase * shifted
    return r


def _heff_batch(gains: np.ndarray, delays: np.ndarray, dops: np.ndarray,
                p: DaftParams) -> np.ndarray:
    """(count, N, N) effective matrices via chirp/FFT conjugation of the
    sparse time-domain channel; delays may be shared (P,) or per-trial."""
    n = p.n
    count, pp = gains.shape
    lam1 = chirp_phase(p.c1, n)
    lam2 = chirp_phase(p.c2, n)
    t = np.arange(n)
    delays = np.broadcast_to(np.asarray(delays, dtype=int), (count, pp))
    M = np.zeros((count, n, n), dtype=complex)
    bidx = np.arange(count)[:, None]
    for i in range(pp):
        l = delays[:, i][:, None]
        cols = (t[None, :] - l) % n
        gamma = np.where(t[None, :] < l,
                         np.exp(-2j * np.pi * p.c1 * (n * n - 2 * n * (l - t[None, :]))),
                         1.0)
        vals = (gains[:, i:i + 1]
                * np.exp(-2j * np.pi * (dops[:, i:i + 1] / n) * t[None, :])
                * gamma * lam1[None, :] * np.conj(lam1)[cols])
        M[bidx, t[None, :], cols] += vals
    G = np.fft.ifft(np.fft.fft(M, axis=-2, norm="ortho"), axis=-1, norm="ortho")
    return lam2[None, :, None] * G * np.conj(lam2)[None, None, :]


# ---------------------------------------------------------------------------
# detection over a block
# ---------------------------------------------------------------------------

_ML_TABLES: dict[int, tuple] = {}


def _bpsk_ml_tables(n_data: int):
    """Candidate bit table and score features for exhaustive BPSK search.

    ||y - Hx||^2 over x in {+-1}^K depends on x only through the K
    symbols and the K(K-1)/2 products x_k x_j, so all 2^K scores follow
    from one weight vector times a fixed feature matrix.
    """
    if n_data not in _ML_TABLES:
        count = 1 << n_data
        idx = np.arange(count, dtype=np.int64)
        shifts = np.arange(n_data - 1, -1, -1)
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
        c = 1.0 - 2.0 * bits
        iu, ju = np.triu_indices(n_data, 1)
        feat = np.ascontiguousarray(np.concatenate([c, c[:, iu] * c[:, ju]], axis=1).T)
        _ML_TABLES[n_data] = (feat, bits, iu, ju)
    return _ML_TABLES[n_data]


def _ml_bpsk_bits(y: np.ndarray, H: np.ndarray) -> np.ndarray:
    n_data = H.shape[-1]
    feat, bits_tab, iu, ju = _bpsk_ml_tables(n_data)
    out = np.empty((y.shape[0], n_data), dtype=np.uint8)
    chunk = max(1, 2 ** 23 // (1 << n_data))
    for s in range(0, y.shape[0], chunk):
        Hc = H[s:s + chunk]
        Hh = np.conj(np.swapaxes(Hc, -1, -2))
        b = np.einsum("cmn,cn->cm", Hh, y[s:s + chunk])
        M = Hh @ Hc
        w = np.concatenate([-2.0 * b.real, 2.0 * M[:, iu, ju].real], axis=1)
        best = np.argmin(w @ feat, axis=1)
        out[s:s + chunk] = bits_tab[best]
    return out


def _dfe_banded(H: np.ndarray, data_index: np.ndarray, delays: np.ndarray,
                dops: np.ndarray, p: DaftParams, xi_nu: int) -> np.ndarray:
    """Zero one trial's data columns outside the per-path +-xi_nu bands."""
    n = p.n
    shift = _two_nc1(p)
    rows = np.arange(n)[:, None]
    mask = np.zeros((n, data_index.size), dtype=bool)
    for l, nu in zip(delays, dops):
        loc = (split_doppler(float(nu))[0] + shift * int(l)) % n
        d = (data_index[None, :] - rows - loc) % n
        mask |= np.minimum(d, n - d) <= xi_nu
    return np.where(mask, H[:, data_index], 0.0)


def _detect_block_bits(cfg: SimConfig, a: Alphabet, layout: FrameLayout,
                       p: DaftParams, y: np.ndarray, H: np.ndarray,
                       snr_lin: float, delays: np.ndarray,
                       dops: np.ndarray) -> np.ndarray:
    H_data = H[:, :, layout.data_index]
    if cfg.detector == "ml":
        if a.kind == "bpsk" and layout.data_capacity <= 16:
            return _ml_bpsk_bits(y, H_data)
        hard = np.stack([ml_core(y[i], H_data[i], a) for i in range(y.shape[0])])
        return demap_bits(hard, a)
    if cfg.detector == "lmmse":
        return demap_bits(lmmse_detect(y, H_data, snr_lin), a)
    delays = np.broadcast_to(np.asarray(delays, dtype=int), dops.shape)
    cfg_dfe = DfeConfig(gamma=snr_lin, n_iter=cfg.n_iter, epsilon=cfg.epsilon)
    soft = np.empty((y.shape[0], layout.data_capacity), dtype=complex)
    for i in range(y.shape[0]):
        banded = _dfe_banded(H[i], layout.data_index, delays[i], dops[i], p,
                             cfg.resolved_xi_nu)
        soft[i] = mrc_dfe_detect(y[i], banded, cfg_dfe).symbols
    return demap_bits(soft, a)


# ---------------------------------------------------------------------------
# block simulation
# ---------------------------------------------------------------------------

def _pilot_amplitude(cfg: SimConfig, layout: FrameLayout, n0: float) -> float:
    if layout.pilot_index is None:
        return 0.0
    if cfg.snr_p_db is None:
        raise ConfigurationError("embedded-pilot layout needs snr_p_db")
    return math.sqrt(10 ** (cfg.snr_p_db / 10) * n0)


def _simulate_block(cfg: SimConfig, point_index: int, block_index: int,
                    count: int):
    """One block of the honest pipeline, through to the received frame."""
    p = cfg.daft_params()
    a = cfg.alphabet_obj()
    layout = cfg.frame_layout()
    snr_lin = 10 ** (cfg.snr_db[point_index] / 10)
    n0 = 1.0 / snr_lin
    rng_c = _rng_common(cfg.seed, block_index)
    rng_n = _rng_noise(cfg.seed, block_index, point_index)
    gains, delays, dops = _draw_channels(cfg, rng_c, count)
    bits = rng_c.integers(0, 2, size=(count, layout.data_capacity * a.bits_per_symbol),
                          dtype=np.uint8)
    x_p = _pilot_amplitude(cfg, layout, n0)
    frame = build_frame(map_bits(bits, a), layout, pilot=x_p)
    tx = add_cpp(modulate(frame, p), cfg.l_max, p.c1)
    r = _apply_paths(tx, gains, delays, dops, cfg.n, cfg.l_max)
    w = rng_n.standard_normal(r.shape) + 1j * rng_n.standard_normal(r.shape)
    y = demodulate(strip_cpp(r + np.sqrt(n0 / 2) * w, cfg.l_max), p)
    return p, a, layout, snr_lin, x_p, bits, y, gains, delays, dops


def _estimate_block(cfg: SimConfig, p: DaftParams, layout: FrameLayout,
                    y: np.ndarray, x_p: float):
    """Per-trial channel estimates; ok flags trials whose solve succeeded."""
    count = y.shape[0]
    pp = cfg.p_paths
    t_tx, t_rx = window_indices(cfg.n, layout.q, cfg.alpha_max, cfg.resolved_xi_nu)
    e_gains = np.zeros((count, pp), dtype=complex)
    e_delays = np.zeros((count, pp), dtype=int)
    e_dops = np.zeros((count, pp))
    ok = np.ones(count, dtype=bool)
    for i in range(count):
        w = EstimationWindow(y_e=y[i, t_rx], x_pilot=x_p, t_tx=t_tx, t_rx=t_rx,
                             params=p)
        try:
            if cfg.estimation == "integer":
                ests = estimate_integer(w, pp, cfg.l_max, cfg.alpha_max)
            else:
                ests = estimate_fractional(w, pp, cfg.l_max, cfg.alpha_max)
        except EstimationError:
            ok[i] = False
            continue
        e_gains[i] = [e.gain for e in ests]
        e_delays[i] = [e.delay for e in ests]
        e_dops[i] = [e.doppler for e in ests]
    return e_gains, e_delays, e_dops, ok


def _run_block(cfg: SimConfig, point_index: int, block_index: int,
               count: int) -> tuple[int, int]:
    """(bit errors, trials used) for one block at one SNR point."""
    p, a, layout, snr_lin, x_p, bits, y, gains, delays, dops = _simulate_block(
        cfg, point_index, block_index, count)
    if cfg.estimation == "ideal-csi":
        H = _heff_batch(gains, delays, dops, p)
        det_delays, det_dops = delays, dops
    else:
        e_gains, e_delays, e_dops, ok = _estimate_block(cfg, p, layout, y, x_p)
        y, bits = y[ok], bits[ok]
        if not y.shape[0]:
            return 0, 0
        H = _heff_batch(e_gains[ok], e_delays[ok], e_dops[ok], p)
        det_delays, det_dops = e_delays[ok], e_dops[ok]
    if layout.pilot_index is not None:
        y = y - x_p * H[:, :, layout.pilot_index]
    rx = _detect_block_bits(cfg, a, layout, p, y, H, snr_lin, det_delays, det_dops)
    return int(np.count_nonzero(rx != bits)), int(y.shape[0])


def _run_block_star(args) -> tuple[int, int]:
    return _run_block(*args)


def _blocks(cfg: SimConfig) -> list[tuple[int, int]]:
    bs = block_size(cfg.n)
    return [(b, min(bs, cfg.trials - b * bs))
            for b in range((cfg.trials + bs - 1) // bs)]


def run_ber_sweep(cfg: SimConfig, workers: int | None = None) -> list[BerRecord]:
    """Simulate every SNR point of the config; deterministic given seed."""
    cfg.check_feasible()
    workers = worker_count(workers)
    h = config_hash(cfg)
    layout = cfg.frame_layout()
    bits_per_frame = layout.data_capacity * cfg.alphabet_obj().bits_per_symbol
    blocks = _blocks(cfg)
    records = []
    for pi, snr in enumerate(cfg.snr_db):
        t0 = time.perf_counter()
        jobs = [(cfg, pi, b, c) for b, c in blocks]
        if workers == 1:
            parts = [_run_block_star(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_run_block_star, jobs))
        errors = sum(e for e, _ in parts)
        used = sum(u for _, u in parts)
        ber = errors / (used * bits_per_frame) if used else 0.0
        records.append(BerRecord(h, cfg.waveform, cfg.detector, float(snr),
                                 used, errors, ber,
                                 (time.perf_counter() - t0) * 1e3))
    return records


def run_estimation_trials(cfg: SimConfig) -> EstRecord:
    """Estimation quality at snr_p_db: exact delay-Doppler recovery rate
    and aggregate gain NMSE, with data symbols live in the frame.

    The noise level comes from the first snr_db point; the pilot is
    snr_p_db above it.
    """
    if cfg.estimation == "ideal-csi":
        raise ConfigurationError("estimation run needs estimation = integer|fractional")
    t0 = time.perf_counter()
    exact = 0
    err_energy = 0.0
    ref_energy = 0.0
    used = 0
    for block_index, count in _blocks(cfg):
        p, _, layout, _, x_p, _, y, gains, delays, dops = _simulate_block(
            cfg, 0, block_index, count)
        e_gains, e_delays, e_dops, ok = _estimate_block(cfg, p, layout, y, x_p)
        alphas = np.array([[split_doppler(float(v))[0] for v in row] for row in dops])
        for i in range(count):
            if not ok[i]:
                continue
            used += 1
            truth = {int(l): (int(al), complex(g))
                     for l, al, g in zip(delays, alphas[i], gains[i])}
            est_pairs = {(int(l), int(split_doppler(float(v))[0]))
                         for l, v in zip(e_delays[i], e_dops[i])}
            if est_pairs == {(l, al) for l, (al, _) in truth.items()}:
                exact += 1
            est_gain = {int(l): complex(g)
                        for l, g in zip(e_delays[i], e_gains[i])}
            for l, (_, g) in truth.items():
                err_energy += abs(est_gain.pop(l, 0.0) - g) ** 2
                ref_energy += abs(g) ** 2
            err_energy += sum(abs(g) ** 2 for g in est_gain.values())
    nmse_db = 10 * math.log10(err_energy / ref_energy) if ref_energy else -math.inf
    return EstRecord(config_hash(cfg), cfg.estimation, float(cfg.snr_p_db),
                     used, exact / used if used else 0.0, nmse_db,
                     (time.perf_counter() - t0) * 1e3)


def run_convergence_report(cfg: SimConfig) -> list[ConvergenceRow]:
    """Spectral radius and DFE iterations-to-stop over sampled channels."""
    rows = []
    cid = 0
    for block_index, count in _blocks(cfg):
        p, a, layout, snr_lin, x_p, bits, y, gains, delays, dops = _simulate_block(
            cfg, 0, block_index, count)
        H = _heff_batch(gains, delays, dops, p)
        if layout.pilot_index is not None:
            y = y - x_p * H[:, :, layout.pilot_index]
        det_delays = np.broadcast_to(delays, dops.shape)
        cfg_dfe = DfeConfig(gamma=snr_lin, n_iter=cfg.n_iter, epsilon=cfg.epsilon)
        for i in range(count):
            banded = _dfe_banded(H[i], layout.data_index, det_delays[i], dops[i],
                                 p, cfg.resolved_xi_nu)
            res = mrc_dfe_detect(y[i], banded, cfg_dfe)
            rows.append(ConvergenceRow(cid, spectral_radius(banded, snr_lin),
                                       res.iterations_used, res.final_delta))
            cid += 1
    return rows


def estimate_diversity_slope(records: list[BerRecord], snr_lo_db: float,
                             snr_hi_db: float) -> float:
    """Least-squares slope of log10(BER) vs log10(linear SNR) in a window."""
    pts = sorted((r.snr_db, r.ber) for r in records
                 if snr_lo_db - 1e-9 <= r.snr_db <= snr_hi_db + 1e-9 and r.ber > 0)
    if len(pts) < 2:
        raise InsufficientDataError(
            f"need 2 non-zero BER points in [{snr_lo_db}, {snr_hi_db}] dB, "
            f"have {len(pts)}")
    x = np.array([s / 10 for s, _ in pts])
    v = np.log10([b for _, b in pts])
    return float(np.polyfit(x, v, 1)[0])


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def write_ber_csv(records: list[BerRecord], path: str) -> None:
    lines = [BER_HEADER]
    for r in records:
        lines.append(f"{r.config_hash},{r.waveform},{r.detector},{r.snr_db:g},"
                     f"{r.trials},{r.bit_errors},{r.ber!r},{r.wall_ms:.3f}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_ber_csv(path: str) -> list[BerRecord]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != BER_HEADER:
        raise ConfigurationError(f"{path} is not a BER result file")
    out = []
    for ln in lines[1:]:
        ch, wf, det, snr, trials, errs, ber, wall = ln.split(",")
        out.append(BerRecord(ch, wf, det, float(snr), int(trials), int(errs),
                             float(ber), float(wall)))
    return out


def write_est_csv(records: list[EstRecord], path: str) -> None:
    lines = [EST_HEADER]
    for r in records:
        lines.append(f"{r.config_hash},{r.mode},{r.snr_p_db:g},{r.trials},"
                     f"{r.exact_rate!r},{r.gain_nmse_db!r},{r.wall_ms:.3f}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
