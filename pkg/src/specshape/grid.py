"""Subcarrier frequency grid and per-subcarrier interference integration.

The grid spans the total bandwidth symmetrically about 0 Hz with centers
f_n = -BW/2 + (n-1)*df (n = 1..N, 1-based at all interfaces), so n = N/2+1
is DC and n = 1, N line up with the two flanking interferer channels.
A guard prescription always nulls the DC subcarrier plus the first and
last quarters of the indices, which confines transmission to the central
half of the band.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .pulses import AnalyticPsd

__all__ = [
    "SubcarrierGrid",
    "InterferenceProfile",
    "build_grid",
    "integrate_interference",
    "build_profile",
]

ALLOWED_SIZES = (16, 32, 64, 128)


@dataclass(frozen=True)
class SubcarrierGrid:
    n_subcarriers: int
    total_bandwidth_hz: float
    spacing_hz: float
    centers_hz: np.ndarray          # shape (N,), strictly increasing
    forced_null: np.ndarray         # bool mask, True where transmission is barred

    @property
    def dc_index(self) -> int:
        """1-based index of the DC subcarrier."""
        return self.n_subcarriers // 2 + 1

    @property
    def forced_null_indices(self) -> tuple[int, ...]:
        """1-based forced-null indices."""
        return tuple(int(i) + 1 for i in np.flatnonzero(self.forced_null))

    @property
    def eligible(self) -> np.ndarray:
        return ~self.forced_null


def build_grid(n_subcarriers: int, total_bandwidth_hz: float = 1e6,
               guard_fraction: float = 0.25) -> SubcarrierGrid:
    """Build the grid and its forced-null guard set.

    guard_fraction g nulls indices {1..gN+1}, {N/2+1} and {N-gN+1..N}; the
    default 1/4 keeps the usable span at half the total bandwidth.
    """
    if n_subcarriers not in ALLOWED_SIZES:
        raise ValueError(f"n_subcarriers must be one of {ALLOWED_SIZES}")
    if total_bandwidth_hz <= 0:
        raise ValueError("total_bandwidth_hz must be > 0")
    if not 0.0 <= guard_fraction < 0.5:
        raise ValueError("guard_fraction must be in [0, 0.5)")

    N = n_subcarriers
    df = total_bandwidth_hz / N
    centers = -total_bandwidth_hz / 2.0 + np.arange(N) * df

    g = int(round(guard_fraction * N))
    mask = np.zeros(N, dtype=bool)
    mask[: g + 1] = True          # 1..gN+1
    mask[N // 2] = True           # DC
    if g > 0:
        mask[N - g:] = True       # N-gN+1..N
    return SubcarrierGrid(N, total_bandwidth_hz, df, centers, mask)


@dataclass(frozen=True)
class InterferenceProfile:
    """Per-subcarrier interference powers plus the receiver noise floor."""

    interference_w: np.ndarray      # I_n, shape (N,)
    noise_density: float            # W/Hz
    noise_per_subcarrier_w: float   # spacing * density

    def __post_init__(self) -> None:
        if np.any(self.interference_w < 0):
            raise ValueError("interference powers must be >= 0")
        if self.noise_density <= 0:
            raise ValueError("noise_density must be > 0")

    @property
    def sinr_denominator_w(self) -> np.ndarray:
        """I_n + df*sigma^2 per subcarrier (the capacity denominator)."""
        return self.interference_w + self.noise_per_subcarrier_w


class QuadratureError(RuntimeError):
    """Subcarrier integral failed to converge; carries the 1-based index."""

    def __init__(self, index_1b: int, message: str):
        super().__init__(f"subcarrier {index_1b}: {message}")
        self.index_1b = index_1b


def integrate_interference(grid: SubcarrierGrid,
                           psds: list[AnalyticPsd]) -> np.ndarray:
    """I_n: integral of each emitter PSD over each subcarrier band, summed.

    Emitters add in power.  Bands that lie entirely outside an emitter's
    support contribute zero without invoking quadrature.
    """
    N = grid.n_subcarriers
    half = grid.spacing_hz / 2.0
    out = np.zeros(N)
    for psd in psds:
        lo_support = psd.center_hz - 1.5 * psd.half_extent_hz
        hi_support = psd.center_hz + 1.5 * psd.half_extent_hz
        for i in range(N):
            lo, hi = grid.centers_hz[i] - half, grid.centers_hz[i] + half
            if hi < lo_support or lo > hi_support:
                continue
            val, err = quad(psd.eval, lo, hi, limit=200,
                            epsabs=1e-12, epsrel=1e-9)
            if err > max(1e-12, abs(val) * 1e-6):
                raise QuadratureError(i + 1, f"estimated error {err:g}")
            out[i] += val
    return out


def build_profile(grid: SubcarrierGrid, psds: list[AnalyticPsd],
                  noise_density: float) -> InterferenceProfile:
    """Convenience: integrate all emitters and attach the noise floor."""
    return InterferenceProfile(
        interference_w=integrate_interference(grid, psds),
        noise_density=noise_density,
        noise_per_subcarrier_w=grid.spacing_hz * noise_density,
    )


def profile_to_csv(grid: SubcarrierGrid, profile: InterferenceProfile) -> str:
    """CSV with columns (index, f_n_hz, I_n_w, noise_w); 1-based indices."""
    buf = io.StringIO()
    buf.write("index,f_n_hz,I_n_w,noise_w\n")
    for i in range(grid.n_subcarriers):
        buf.write(f"{i + 1},{grid.centers_hz[i]:.17g},"
                  f"{profile.interference_w[i]:.17g},"
                  f"{profile.noise_per_subcarrier_w:.17g}\n")
    return buf.getvalue()
