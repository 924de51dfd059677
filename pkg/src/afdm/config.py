"""Run configuration: a flat key = value text format, validation, and a
canonical serialization whose hash names every result row.

The format is line-oriented: `key = value`, `#` starts a comment, keys
are fixed by the schema below and carry a schema_version for forward
compatibility. SNR grids accept either a comma list (`0,4,8`) or an
inclusive range (`0:2:18` as start:step:stop).
"""

from __future__ import annotations

import hashlib
from dataclasses import MISSING, dataclass, fields, replace

import numpy as np

from .daft import DaftParams
from .effective import choose_c1, choose_c2, guard_count
from .errors import CapacityError, ConfigurationError
from .modem import ALPHABETS, Alphabet, FrameLayout

__all__ = ["SimConfig", "parse_config", "load_config", "serialize_config",
           "config_hash"]

SCHEMA_VERSION = 1

WAVEFORMS = ("afdm", "ofdm", "ocdm")
DETECTORS = ("ml", "lmmse", "mrc-dfe")
DOPPLER_MODES = ("integer-uniform", "jakes", "fixed")
ESTIMATION_MODES = ("ideal-csi", "integer", "fractional")
LAYOUTS = ("auto", "data-only", "zero-padded", "embedded-pilot")

ML_BUDGET = 2 ** 24


@dataclass(frozen=True)
class SimConfig:
    waveform: str
    n: int
    alphabet: str
    detector: str
    p_paths: int
    l_max: int
    alpha_max: int
    doppler_mode: str
    snr_db: tuple[float, ...]
    trials: int
    seed: int
    fractional: bool | None = None
    snr_p_db: float | None = None
    xi_nu: int | None = None
    k_nu: int | None = None
    estimation: str = "ideal-csi"
    layout: str = "auto"
    dopplers: tuple[float, ...] | None = None
    gains: tuple[complex, ...] | None = None
    n_iter: int = 20
    epsilon: float | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        checks = [
            (self.waveform in WAVEFORMS, f"waveform must be one of {WAVEFORMS}"),
            (self.detector in DETECTORS, f"detector must be one of {DETECTORS}"),
            (self.alphabet in ALPHABETS, f"alphabet must be one of {tuple(ALPHABETS)}"),
            (self.doppler_mode in DOPPLER_MODES,
             f"doppler_mode must be one of {DOPPLER_MODES}"),
            (self.estimation in ESTIMATION_MODES,
             f"estimation must be one of {ESTIMATION_MODES}"),
            (self.layout in LAYOUTS, f"layout must be one of {LAYOUTS}"),
            (self.n >= 2, "n must be at least 2"),
            (self.p_paths >= 1, "p_paths must be positive"),
            (self.l_max >= 0 and self.alpha_max >= 0,
             "l_max and alpha_max must be non-negative"),
            (self.trials >= 1, "trials must be positive"),
            (len(self.snr_db) >= 1, "snr_db grid is empty"),
            (self.seed >= 0, "seed must be a non-negative integer"),
            (self.schema_version == SCHEMA_VERSION,
             f"unsupported schema_version {self.schema_version}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigurationError(msg)
        if self.doppler_mode == "fixed" and self.dopplers is None:
            raise ConfigurationError("fixed doppler mode needs a dopplers list")
        if self.p_paths > self.l_max + 1:
            raise ConfigurationError(
                f"{self.p_paths} distinct delays do not fit in 0..{self.l_max}")
        for name, vals in (("dopplers", self.dopplers), ("gains", self.gains)):
            if vals is not None and len(vals) != self.p_paths:
                raise ConfigurationError(f"{name} must list p_paths = {self.p_paths} values")
        if self.estimation != "ideal-csi" and self.snr_p_db is None:
            raise ConfigurationError("estimation runs need snr_p_db")
        if self.xi_nu is not None and self.xi_nu < 0:
            raise ConfigurationError("xi_nu must be non-negative")

    @property
    def is_fractional(self) -> bool:
        if self.fractional is not None:
            return self.fractional
        if self.doppler_mode == "fixed":
            return any(abs(v - round(v)) > 1e-12 for v in self.dopplers)
        return self.doppler_mode == "jakes"

    @property
    def resolved_xi_nu(self) -> int:
        if self.xi_nu is not None:
            return self.xi_nu
        return 1 if self.is_fractional else 0

    @property
    def q(self) -> int:
        return guard_count(self.l_max, self.alpha_max, self.resolved_xi_nu)

    def alphabet_obj(self) -> Alphabet:
        return ALPHABETS[self.alphabet]

    def daft_params(self) -> DaftParams:
        if self.waveform == "ofdm":
            return DaftParams(self.n, 0.0, 0.0)
        if self.waveform == "ocdm":
            return DaftParams(self.n, 1 / (2 * self.n), 1 / (2 * self.n))
        c1 = choose_c1(self.alpha_max, self.resolved_xi_nu, self.n,
                       self.is_fractional)
        return DaftParams(self.n, c1, choose_c2(self.n))

    @property
    def resolved_layout(self) -> str:
        if self.layout != "auto":
            return self.layout
        if self.estimation != "ideal-csi":
            return "embedded-pilot"
        return "data-only" if self.detector == "ml" else "zero-padded"

    def frame_layout(self) -> FrameLayout:
        kind = self.resolved_layout
        m = self.alpha_max + self.resolved_xi_nu
        if kind == "data-only":
            return FrameLayout.data_only(self.n)
        if kind == "zero-padded":
            return FrameLayout.zero_padded(self.n, self.q, m)
        return FrameLayout.embedded_pilot(self.n, self.q, m)

    def check_feasible(self) -> None:
        """Reject detector/size combinations before any trial runs."""
        if self.detector == "ml":
            a = self.alphabet_obj()
            n_data = self.frame_layout().data_capacity
            if a.size ** n_data > ML_BUDGET:
                raise CapacityError(
                    f"ml over {a.size}^{n_data} candidates exceeds {ML_BUDGET}")

    def with_overrides(self, **kw) -> "SimConfig":
        return replace(self, **kw)


_BOOLS = {"true": True, "yes": True, "1": True,
          "false": False, "no": False, "0": False}


def _parse_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = [float(v) for v in text.split(":")]
        if len(parts) != 3 or parts[1] <= 0:
            raise ConfigurationError(f"bad grid {text!r}, want start:step:stop")
        start, step, stop = parts
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ConfigurationError(f"empty grid {text!r}")
        return tuple(start + step * k for k in range(count))
    return tuple(float(v) for v in text.split(","))


def _parse_value(key: str, text: str):
    if text.lower() == "none":
        return None
    if key in ("n", "p_paths", "l_max", "alpha_max", "trials", "seed",
               "xi_nu", "k_nu", "n_iter", "schema_version"):
        return int(text)
    if key in ("snr_p_db", "epsilon"):
        return float(text)
    if key == "fractional":
        if text.lower() not in _BOOLS:
            raise ConfigurationError(f"bad boolean {text!r} for {key}")
        return _BOOLS[text.lower()]
    if key == "snr_db":
        return _parse_grid(text)
    if key == "dopplers":
        return tuple(float(v.strip()) for v in text.split(","))
    if key == "gains":
        return tuple(complex(v.strip()) for v in text.split(","))
    return text


def parse_config(text: str) -> SimConfig:
    names = {f.name for f in fields(SimConfig)}
    seen: dict[str, object] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {ln}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in names:
            raise ConfigurationError(f"line {ln}: unknown key {key!r}")
        if key in seen:
            raise ConfigurationError(f"line {ln}: duplicate key {key!r}")
        try:
            seen[key] = _parse_value(key, value)
        except (ValueError, TypeError) as exc:
            raise ConfigurationError(f"line {ln}: bad value for {key}: {exc}")
    required = {f.name for f in fields(SimConfig)
                if f.default is MISSING and f.default_factory is MISSING}
    missing = sorted(required - seen.keys())
    if missing:
        raise ConfigurationError(f"missing required keys: {', '.join(missing)}")
    return SimConfig(**seen)


def load_config(path: str) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(_format_value(x) for x in v)
    if isinstance(v, complex):
        return format(v, "g").strip("()")
    return str(v)


def serialize_config(cfg: SimConfig) -> str:
    """Canonical text form: every key, fixed order, normalized values."""
    lines = [f"{f.name} = {_format_value(getattr(cfg, f.name))}"
             for f in fields(SimConfig)]
    return "\n".join(lines) + "\n"


def config_hash(cfg: SimConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()[:12]
