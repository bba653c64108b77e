"""Movable-antenna spatial-modulation link design and simulation toolkit."""

from .baselines import SCHEMES, fpa_scheme, gas_scheme, ma_one_side, solve_scheme
from .beamforming import (
    LinearizedConstraint,
    PairQuadratic,
    SolverFailure,
    build_pair_matrices,
    linearize,
    sca_beamforming,
    solve_w_subproblem,
)
from .ber import BerResult, ml_detect, simulate_ber
from .channel import (
    AntennaLayout,
    ChannelRealization,
    assemble_channel,
    check_layout,
    receive_frm,
    receive_frv,
    sample_channel,
    transmit_frm,
    transmit_frv,
)
from .codebook import (
    SmCodebook,
    SmSymbol,
    bits_per_symbol,
    bits_to_symbol,
    build_codebook,
    symbol_to_bits,
)
from .config import ConfigError, SolverSettings, SystemConfig, config_hash, load_config
from .estimator import MmdTransceiver
from .metrics import DistanceReport, min_distance, pep_upper_bound, q_function
from .positioning import (
    CoordinateExpansion,
    QuadraticSurrogate,
    feasible_intervals,
    make_surrogate,
    maximize_min_surrogate,
    rx_expansion,
    tx_expansion,
)
from .solver import SolveRecord, initialize, optimize, solve

__version__ = "0.1.0"
