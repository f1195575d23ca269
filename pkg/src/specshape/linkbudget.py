"""Free-space link budget: receiver-side powers, noise floor, and Eb/N0.

Geometry: a desired transmitter and an interfering ground emitter, both at
line-of-sight distances from the receiver.  Antenna gains are lumped per
link leg.  The absolute constants (noise figure, gains) are scenario
parameters; the shipped ``paper-repro.toml`` freezes one calibrated set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .grid import SubcarrierGrid, build_profile
from .pulses import PulseTrainSpec, analytic_psd, train_mean_power
from .waterfill import Allocation, AllocationRequest

__all__ = [
    "SPEED_OF_LIGHT",
    "BOLTZMANN",
    "LinkScenario",
    "RxPowers",
    "free_space_loss_db",
    "noise_density_w_hz",
    "receiver_powers",
    "allocation_request",
    "ebn0_db",
]

SPEED_OF_LIGHT = 299_792_458.0
BOLTZMANN = 1.380649e-23


@dataclass(frozen=True)
class LinkScenario:
    d_tx_rx_m: float
    d_intf_rx_m: float
    intf_specs: list[PulseTrainSpec] = field(default_factory=list)
    carrier_freq_hz: float = 1.0e9
    tx_power_w: float = 1.0
    noise_temp_k: float = 290.0
    noise_figure_db: float = 6.0
    desired_gain_db: float = 0.0     # antenna gains on the desired leg, summed
    intf_gain_db: float = 0.0        # antenna gains on the interferer leg

    def __post_init__(self) -> None:
        if self.d_tx_rx_m <= 0 or self.d_intf_rx_m <= 0:
            raise ValueError("distances must be > 0")
        if self.carrier_freq_hz <= 0:
            raise ValueError("carrier_freq_hz must be > 0")
        if self.tx_power_w <= 0:
            raise ValueError("tx_power_w must be > 0")


@dataclass(frozen=True)
class RxPowers:
    signal_w: float
    intf_mean_w: tuple[float, ...]   # one entry per emitter, at the receiver
    noise_density: float             # W/Hz


def free_space_loss_db(d_m: float, f_hz: float) -> float:
    """20 log10(4 pi d f / c)."""
    if d_m <= 0 or f_hz <= 0:
        raise ValueError("distance and frequency must be > 0")
    return 20.0 * math.log10(4.0 * math.pi * d_m * f_hz / SPEED_OF_LIGHT)


def noise_density_w_hz(s: LinkScenario) -> float:
    """One-sided noise density k_B * T * 10^(NF/10)."""
    return BOLTZMANN * s.noise_temp_k * 10.0 ** (s.noise_figure_db / 10.0)


def receiver_powers(s: LinkScenario) -> RxPowers:
    """Attenuate transmit-side powers to the receiver and attach the noise floor.

    Interferer entries are *mean* train powers (these feed the PSD
    normalization); the desired entry is the total transmit power through
    its own leg.
    """
    loss_sig = free_space_loss_db(s.d_tx_rx_m, s.carrier_freq_hz) - s.desired_gain_db
    loss_int = free_space_loss_db(s.d_intf_rx_m, s.carrier_freq_hz) - s.intf_gain_db
    sig = s.tx_power_w * 10.0 ** (-loss_sig / 10.0)
    intf = tuple(
        train_mean_power(spec) * 10.0 ** (-loss_int / 10.0) for spec in s.intf_specs
    )
    return RxPowers(signal_w=sig, intf_mean_w=intf,
                    noise_density=noise_density_w_hz(s))


def allocation_request(s: LinkScenario, grid: SubcarrierGrid,
                       k_threshold: float) -> AllocationRequest:
    """Receiver-referenced allocation problem for this scenario.

    Interference and noise are receiver-side, so the power budget is too:
    the transmit power attenuated through the desired leg.  Allocations
    solved from this request therefore carry receiver-side watts.
    """
    rx = receiver_powers(s)
    psds = [analytic_psd(spec, p)
            for spec, p in zip(s.intf_specs, rx.intf_mean_w)]
    profile = build_profile(grid, psds, rx.noise_density)
    return AllocationRequest(profile, grid, rx.signal_w, k_threshold)


def ebn0_db(s: LinkScenario, alloc: Allocation, spacing_hz: float,
            bits_per_symbol: int = 4, cp_fraction: float = 0.0) -> float:
    """Energy per information bit over noise density, in dB.

    The bit rate is n_active * bits_per_symbol per core symbol period
    1/spacing.  cp_fraction > 0 stretches the symbol (and thus spends extra
    energy per bit) for cyclic-prefix systems; the default charges no
    guard-time overhead.
    """
    if alloc.is_empty:
        raise ValueError("Eb/N0 undefined for an empty allocation")
    rx = receiver_powers(s)
    bit_rate = alloc.n_active * bits_per_symbol * spacing_hz / (1.0 + cp_fraction)
    return 10.0 * math.log10(rx.signal_w / (bit_rate * rx.noise_density))


def ebn0_to_distance_m(s: LinkScenario, alloc: Allocation, spacing_hz: float,
                       target_ebn0_db: float, bits_per_symbol: int = 4) -> float:
    """Distance at which the scenario would hit the given Eb/N0 (free space)."""
    current = ebn0_db(s, alloc, spacing_hz, bits_per_symbol)
    return s.d_tx_rx_m * 10.0 ** ((current - target_ebn0_db) / 20.0)
