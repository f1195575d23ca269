"""specshape: spectral shaping of multicarrier waveforms for pulsed-interference channels.

Submodules
----------
pulses       interfering pulse-train models (Gaussian pairs, rectangles)
grid         subcarrier grid and per-subcarrier interference integration
waterfill    constrained water-filling allocator plus an independent oracle
linkbudget   free-space link budget, noise floor, Eb/N0
waveform     weighted OFDM / filter-bank synthesis and Welch PSD
bersim       Monte-Carlo 16-QAM bit-error-rate engine
report       figure-dataset bundles (CSV + manifest)
cli          command-line interface
"""

__version__ = "0.1.0"

from ._kernels import backend_name
from .grid import InterferenceProfile, SubcarrierGrid, build_grid, build_profile
from .linkbudget import (
    LinkScenario,
    allocation_request,
    ebn0_db,
    free_space_loss_db,
    noise_density_w_hz,
    receiver_powers,
)
from .pulses import (
    AnalyticPsd,
    PulseKind,
    PulseTrainSpec,
    analytic_psd,
    dme_pair_mean_power_factor,
    dme_pair_time,
    sample_pulse_train,
    train_mean_power,
)
from .waterfill import (
    Allocation,
    AllocationRequest,
    capacity_of,
    k_sweep,
    oracle_waterfill,
    solve_waterfill,
)
from .bersim import awgn_ber_16qam, run_ber_curve, run_ber_point

__all__ = [
    "__version__",
    "backend_name",
    "PulseKind",
    "PulseTrainSpec",
    "AnalyticPsd",
    "dme_pair_time",
    "dme_pair_mean_power_factor",
    "train_mean_power",
    "analytic_psd",
    "sample_pulse_train",
    "SubcarrierGrid",
    "InterferenceProfile",
    "build_grid",
    "build_profile",
    "Allocation",
    "AllocationRequest",
    "solve_waterfill",
    "oracle_waterfill",
    "capacity_of",
    "k_sweep",
    "LinkScenario",
    "free_space_loss_db",
    "noise_density_w_hz",
    "receiver_powers",
    "allocation_request",
    "ebn0_db",
    "awgn_ber_16qam",
    "run_ber_point",
    "run_ber_curve",
]
