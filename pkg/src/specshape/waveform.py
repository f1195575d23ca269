"""Multicarrier waveform synthesis: weighted OFDM, filter-bank synthesis,
and Welch PSD measurement.

Per-subcarrier amplitude weights A_n = sqrt(P_n) shape the transmit
spectrum.  The OFDM path is the one used for error-rate simulation; the
filter-bank path (PHYDYAS prototype, overlap factor 4, offset-QAM
staggering) exists for transmit-PSD synthesis, where its sharp subcarrier
filters give far lower out-of-band leakage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sp_signal

from .waterfill import Allocation

__all__ = [
    "WeightVector",
    "PrototypeFilter",
    "phydyas_prototype",
    "weights_from_allocation",
    "ofdm_modulate",
    "ofdm_demodulate",
    "fbmc_synthesize",
    "measure_psd",
    "write_series",
    "read_series",
]


@dataclass(frozen=True)
class WeightVector:
    """Amplitude factors per subcarrier; sum of squares equals total power."""

    weights: np.ndarray

    @property
    def total_power_w(self) -> float:
        return float(np.sum(self.weights**2))


def weights_from_allocation(alloc: Allocation) -> WeightVector:
    """A_n = sqrt(P_n); zero exactly on inactive subcarriers."""
    return WeightVector(weights=np.sqrt(alloc.powers_w))


# ---------------------------------------------------------------------------
# OFDM

def _grid_to_fft_order(n_subcarriers: int, nfft: int) -> np.ndarray:
    """FFT bin index of grid subcarrier n (grid order: -BW/2 ... +BW/2-df)."""
    return (np.arange(n_subcarriers) - n_subcarriers // 2) % nfft


def ofdm_modulate(symbols: np.ndarray, weights: WeightVector,
                  cp_fraction: float = 0.0, oversample: int = 1) -> np.ndarray:
    """One weighted OFDM block at complex baseband.

    The average power of the core block equals sum(|A_n s_n|^2) for
    unit-variance symbols, independent of the oversampling factor.  The
    cyclic prefix (a copy of the block tail) is prepended when
    cp_fraction > 0.
    """
    w = weights.weights
    if symbols.shape != w.shape:
        raise ValueError("symbols/weights length mismatch")
    if not 0.0 <= cp_fraction <= 0.25:
        raise ValueError("cp_fraction must be in [0, 0.25]")
    N = len(w)
    nfft = N * oversample
    spec = np.zeros(nfft, dtype=complex)
    spec[_grid_to_fft_order(N, nfft)] = w * symbols
    core = np.fft.ifft(spec) * nfft / np.sqrt(N)
    n_cp = int(round(cp_fraction * nfft))
    if n_cp:
        return np.concatenate([core[-n_cp:], core])
    return core


def ofdm_demodulate(block: np.ndarray, n_subcarriers: int,
                    oversample: int = 1, cp_fraction: float = 0.0) -> np.ndarray:
    """Inverse of ofdm_modulate up to the weights: returns A_n * s_n."""
    nfft = n_subcarriers * oversample
    n_cp = int(round(cp_fraction * nfft))
    core = block[n_cp:n_cp + nfft]
    spec = np.fft.fft(core)
    return spec[_grid_to_fft_order(n_subcarriers, nfft)] * np.sqrt(n_subcarriers) / nfft


# ---------------------------------------------------------------------------
# Filter-bank synthesis

# Frequency-sampling coefficients of the published overlap-4 prototype.
_PROTO_H = (1.0, 0.971960, np.sqrt(2.0) / 2.0, 0.235147)


@dataclass(frozen=True)
class PrototypeFilter:
    overlap_factor: int
    taps: np.ndarray


def phydyas_prototype(n_subcarriers: int, overlap_factor: int = 4) -> PrototypeFilter:
    """Overlap-4 prototype filter on K*N taps, unit peak response at DC."""
    K, N = overlap_factor, n_subcarriers
    L = K * N
    m = np.arange(L)
    taps = np.full(L, _PROTO_H[0])
    for k in range(1, K):
        taps += 2.0 * (-1) ** k * _PROTO_H[k] * np.cos(2.0 * np.pi * k * m / L)
    taps /= taps.sum()  # unit DC response
    return PrototypeFilter(overlap_factor=K, taps=taps)


def fbmc_synthesize(real_symbols: np.ndarray, weights: WeightVector,
                    proto: PrototypeFilter) -> np.ndarray:
    """Offset-QAM staggered multitone synthesis (transmit side only).

    real_symbols has shape (n_half_periods, N): one real value per
    subcarrier per half symbol period.  Adjacent subcarriers and adjacent
    half-periods are phased in quadrature (j^(n+k) rotation); each
    half-period's weighted vector is pulse-shaped by the prototype and
    overlap-added at N/2 spacing.  Output is scaled so the long-run mean
    power equals sum(A_n^2) for unit-variance input.
    """
    w = weights.weights
    N = len(w)
    x = np.asarray(real_symbols, dtype=float)
    if x.ndim == 1:
        if x.size == 0 or x.size % N != 0:
            raise ValueError("flat stream length must be a positive multiple of N")
        x = x.reshape(-1, N)
    if x.shape[1] != N:
        raise ValueError("real_symbols must have N columns")

    K = proto.overlap_factor
    L = K * N
    n_half = x.shape[0]
    step = N // 2
    out = np.zeros(n_half * step + L, dtype=complex)
    n_idx = np.arange(N)
    for k in range(n_half):
        v = (1j ** ((n_idx + k) % 4)) * w * x[k]
        spec = np.zeros(N, dtype=complex)
        spec[_grid_to_fft_order(N, N)] = v
        base = np.fft.ifft(spec) * N
        burst = np.tile(base, K) * proto.taps
        out[k * step:k * step + L] += burst
    # long-run mean power of a unit-weight tone is 2*sum(taps^2)/N for
    # unit-variance real inputs; normalize so total power equals sum(A_n^2)
    scale = np.sqrt(2.0 * np.sum(proto.taps**2) / N)
    return out / scale


# ---------------------------------------------------------------------------
# Baseband series files: interleaved float64 I/Q with a JSON sidecar header

def write_series(path, series: np.ndarray, sample_rate: float) -> None:
    """Write complex samples as interleaved float64 plus <path>.json header."""
    import json
    from pathlib import Path

    p = Path(path)
    data = np.empty(2 * len(series))
    data[0::2] = series.real
    data[1::2] = series.imag
    data.tofile(p)
    Path(str(p) + ".json").write_text(json.dumps(
        {"sample_rate_hz": sample_rate, "length": len(series),
         "format": "interleaved float64 I/Q"}))


def read_series(path) -> tuple[np.ndarray, float]:
    """Inverse of write_series: returns (series, sample_rate)."""
    import json
    from pathlib import Path

    p = Path(path)
    header = json.loads(Path(str(p) + ".json").read_text())
    raw = np.fromfile(p)
    series = raw[0::2] + 1j * raw[1::2]
    if len(series) != header["length"]:
        raise ValueError("series length does not match header")
    return series, float(header["sample_rate_hz"])


# ---------------------------------------------------------------------------
# PSD measurement

def measure_psd(series: np.ndarray, sample_rate: float,
                nfft: int) -> tuple[np.ndarray, np.ndarray]:
    """Welch PSD (Hann window, 50% overlap), two-sided and centered.

    Returns (freqs, density) with density in W/Hz; the integral over the
    band equals the series mean power up to the usual windowing bias.
    """
    if len(series) < 8 * nfft:
        raise ValueError("series shorter than 8 segments")
    freqs, psd = sp_signal.welch(
        series,
        fs=sample_rate,
        window="hann",
        nperseg=nfft,
        noverlap=nfft // 2,
        detrend=False,
        return_onesided=False,
        scaling="density",
    )
    order = np.argsort(freqs)
    return freqs[order], psd[order]
