"""Robust OFDM power allocation for a joint radar/communications waveform.

The package computes water-filling and minimax-robust subcarrier power
allocations that trade radar conditional mutual information against
communications data rate, and checks the analytical properties of those
designs against brute-force oracles.
"""

from .exceptions import (
    ConfigError,
    DimensionError,
    DomainError,
    IrcwError,
    PreconditionError,
    SolverError,
)
from .metrics import (
    ObjectiveConfig,
    PowerAllocation,
    compute_normalizers,
    data_information_rate,
    joint_criterion,
    mutual_information,
    weighted_log_sum,
)
from .ofdm_model import (
    REFERENCE_PARAMS,
    BoundFamily,
    CnrProfile,
    NoiseModel,
    OfdmParams,
    ResponsePoint,
    UncertaintyClass,
    cnr_from_response,
    gaussian_bounds,
    is_member,
    noise_from_snr,
)
from .robust import (
    InverseCnrs,
    RobustSolution,
    closed_form_power,
    kkt_residual,
    solve_robust,
    solve_robust_cnr,
    verify_saddle_point,
    verify_worst_allocation,
    worst_allocation_condition,
)
from .waterfilling import WaterfillResult, comm_optimal, radar_optimal, waterfill

__version__ = "0.1.0"
