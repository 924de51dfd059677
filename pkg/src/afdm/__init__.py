"""Link-level simulation of chirp-based multicarrier modulation over
doubly dispersive channels: transform, modem, channel models, closed-form
effective channels, detectors, pilot-aided estimation, diversity
analysis, and a Monte-Carlo harness with a CLI.
"""

from .analysis import PepBound, min_rank_over_deltas, pep_bound, phi_matrix
from .channel import ChannelPath, LtvChannel, apply_channel, random_channel, \
    split_doppler, time_channel_matrix
from .config import SimConfig, config_hash, load_config, parse_config, \
    serialize_config
from .daft import DaftParams, chirp_phase, daft, daft_matrix, idaft, subcarrier
from .detect import DetectionResult, DfeConfig, lmmse_detect, ml_detect, \
    mrc_dfe_detect, spectral_radius
from .effective import EffectiveChannel, PathEntries, band_truncate, \
    check_separability, choose_c1, choose_c2, default_k_nu, effective_channel, \
    guard_count, heff_entries, heff_from_time, path_loc
from .errors import AfdmError, CapacityError, ConfigurationError, \
    DimensionError, EstimationError, InsufficientDataError
from .estimate import EstimationWindow, PathEstimate, estimate_fractional, \
    estimate_integer, extract_window, pilot_column
from .harness import BerRecord, ConvergenceRow, EstRecord, \
    estimate_diversity_slope, read_ber_csv, run_ber_sweep, \
    run_convergence_report, run_estimation_trials, write_ber_csv, write_est_csv
from .modem import ALPHABETS, Alphabet, FrameLayout, add_cpp, build_frame, \
    cpp_phase, demap_bits, demodulate, extract_data, map_bits, modulate, \
    strip_cpp

__version__ = "0.1.0"
