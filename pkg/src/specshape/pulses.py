"""Pulsed-interferer models: Gaussian pulse pairs and rectangular pulse trains.

Two emitter classes are supported.  The first is the classic ranging-beacon
signal: pairs of Gaussian pulses, the humps separated by ``delta_t`` and the
width set by the constant ``beta`` (default 4.5e11 1/s^2, hump separation
12 us, 2700 pulse pairs per second).  The second is a train of rectangular
pulses.  Pulse (pair) start times follow a Poisson process.

For each class the module provides the time-domain pulse shape, its mean
power, the closed-form power spectral density of the train, and a seeded
sampler that renders the train at complex baseband.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import _kernels

__all__ = [
    "PulseKind",
    "PulseTrainSpec",
    "AnalyticPsd",
    "ModelMismatchError",
    "UnderSamplingError",
    "dme_pair_time",
    "dme_pair_mean_power_factor",
    "train_mean_power",
    "analytic_psd",
    "sample_pulse_train",
    "pair_duration",
    "minimum_sample_rate",
]

#: Standard hump separations for Gaussian pulse pairs (s).
STANDARD_DELTA_T = (12e-6, 36e-6)


class PulseKind(Enum):
    DME_PAIR = "dme"
    RECTANGULAR = "rect"


class ModelMismatchError(ValueError):
    """An operation was applied to the wrong pulse kind."""


class UnderSamplingError(ValueError):
    """Sample rate too low to represent the pulse train."""


@dataclass(frozen=True)
class PulseTrainSpec:
    """Parameters of one interfering pulsed emitter.

    peak_power_w is the transmit (or receiver-side, depending on use) peak
    power of a single pulse.  rate_ppps counts pulse pairs (Gaussian kind)
    or pulses (rectangular kind) per second.  offset_hz places the emitter
    center relative to the desired-signal band center at complex baseband.
    """

    kind: PulseKind
    peak_power_w: float
    rate_ppps: float
    beta: float = 4.5e11
    delta_t_s: float = 12e-6
    pulse_width_s: float = 5e-6
    offset_hz: float = 0.0

    def __post_init__(self) -> None:
        if self.peak_power_w < 0:
            raise ValueError("peak_power_w must be >= 0")
        if self.rate_ppps < 0:
            raise ValueError("rate_ppps must be >= 0")
        if self.kind is PulseKind.DME_PAIR:
            if self.beta <= 0 or self.delta_t_s <= 0:
                raise ValueError("Gaussian pair needs beta > 0 and delta_t_s > 0")
            if not any(math.isclose(self.delta_t_s, s) for s in STANDARD_DELTA_T):
                warnings.warn(
                    f"nonstandard pair separation {self.delta_t_s:g} s "
                    f"(standard values: {STANDARD_DELTA_T})",
                    stacklevel=2,
                )
        else:
            if self.pulse_width_s <= 0:
                raise ValueError("rectangular pulse needs pulse_width_s > 0")
        if self.rate_ppps * pair_duration(self) > 1.0:
            raise ValueError("duty cycle rate * duration exceeds 1")

    def to_config(self) -> dict:
        """Key-value block used by the TOML scenario files."""
        cfg = {
            "kind": self.kind.value,
            "peak_power_w": self.peak_power_w,
            "rate_ppps": self.rate_ppps,
            "offset_hz": self.offset_hz,
        }
        if self.kind is PulseKind.DME_PAIR:
            cfg["beta"] = self.beta
            cfg["delta_t_s"] = self.delta_t_s
        else:
            cfg["pulse_width_s"] = self.pulse_width_s
        return cfg

    @classmethod
    def from_config(cls, cfg: dict) -> "PulseTrainSpec":
        kind = PulseKind(cfg["kind"])
        kwargs = dict(
            kind=kind,
            peak_power_w=float(cfg["peak_power_w"]),
            rate_ppps=float(cfg["rate_ppps"]),
            offset_hz=float(cfg.get("offset_hz", 0.0)),
        )
        if kind is PulseKind.DME_PAIR:
            kwargs["beta"] = float(cfg.get("beta", 4.5e11))
            kwargs["delta_t_s"] = float(cfg.get("delta_t_s", 12e-6))
        else:
            kwargs["pulse_width_s"] = float(cfg["pulse_width_s"])
        return cls(**kwargs)


@dataclass(frozen=True)
class AnalyticPsd:
    """Closed-form one-emitter PSD at complex baseband.

    ``eval(f)`` returns the density in W/Hz; the integral over the full
    support equals ``mean_power``.  ``center_hz`` and ``half_extent_hz``
    bound where the density is non-negligible (used to pick quadrature
    cutoffs).
    """

    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    mean_power: float
    center_hz: float
    half_extent_hz: float


def pair_duration(spec: PulseTrainSpec) -> float:
    """Duration of one pulse pair (Gaussian kind) or one pulse (rect kind)."""
    if spec.kind is PulseKind.DME_PAIR:
        return 2.0 * spec.delta_t_s
    return spec.pulse_width_s


def _require(spec: PulseTrainSpec, kind: PulseKind) -> None:
    if spec.kind is not kind:
        raise ModelMismatchError(f"expected {kind.value} spec, got {spec.kind.value}")


def dme_pair_time(spec: PulseTrainSpec, t) -> np.ndarray:
    """Amplitude of a single Gaussian pulse pair starting at t = 0.

    sqrt(P_peak) * [exp(-beta (t - dt/2)^2 / 2) + exp(-beta (t - 3dt/2)^2 / 2)]
    on [0, 2*dt]; zero outside.
    """
    _require(spec, PulseKind.DME_PAIR)
    t = np.asarray(t, dtype=float)
    dt = spec.delta_t_s
    amp = np.sqrt(spec.peak_power_w) * (
        np.exp(-spec.beta * (t - dt / 2.0) ** 2 / 2.0)
        + np.exp(-spec.beta * (t - 3.0 * dt / 2.0) ** 2 / 2.0)
    )
    return np.where((t >= 0.0) & (t <= 2.0 * dt), amp, 0.0)


def dme_pair_mean_power_factor(spec: PulseTrainSpec) -> float:
    """Mean power of one pulse pair over its duration, as a fraction of peak.

    Computed by quadrature of the squared pair shape; for the standard
    constants this is ~0.22018.
    """
    _require(spec, PulseKind.DME_PAIR)
    dt = spec.delta_t_s
    b = spec.beta

    def sq(t: float) -> float:
        a = math.exp(-b * (t - dt / 2.0) ** 2 / 2.0)
        c = math.exp(-b * (t - 3.0 * dt / 2.0) ** 2 / 2.0)
        return (a + c) ** 2

    val, _ = quad(sq, 0.0, 2.0 * dt, limit=200, epsabs=1e-16, epsrel=1e-12)
    return val / (2.0 * dt)


def dme_pair_mean_power_factor_closed_form(spec: PulseTrainSpec) -> float:
    """erf-based closed form of the pair mean-power fraction (cross-check)."""
    _require(spec, PulseKind.DME_PAIR)
    dt, b = spec.delta_t_s, spec.beta
    rb = math.sqrt(b)
    num = math.sqrt(math.pi) * math.exp(-dt * dt * b / 4.0) * (
        math.exp(dt * dt * b / 4.0)
        * (math.erf(3.0 * dt * rb / 2.0) + math.erf(dt * rb / 2.0))
        + 2.0 * math.erf(dt * rb)
    )
    return num / (2.0 * dt * rb)


def train_mean_power(spec: PulseTrainSpec) -> float:
    """Time-averaged power of the full train in watts.

    Gaussian pairs: pair_mean_fraction * P_peak * rate * 2*dt.
    Rectangles:     P_peak * rate * T.
    """
    if spec.rate_ppps == 0.0 or spec.peak_power_w == 0.0:
        return 0.0
    if spec.kind is PulseKind.DME_PAIR:
        factor = dme_pair_mean_power_factor(spec)
        return factor * spec.peak_power_w * spec.rate_ppps * 2.0 * spec.delta_t_s
    return spec.peak_power_w * spec.rate_ppps * spec.pulse_width_s


def _pulse_energy_spectrum(spec: PulseTrainSpec):
    """(shape(f), integral of shape) for the single-pulse energy spectrum.

    shape is |S(f)|^2 of one pulse (pair) about its own center:
      Gaussian pair: (8 pi P / beta) e^{-4 pi^2 f^2 / beta} cos^2(pi f dt)
      rectangle:     P T^2 sinc^2(T f)
    """
    P = spec.peak_power_w
    if spec.kind is PulseKind.DME_PAIR:
        b, dt = spec.beta, spec.delta_t_s

        def shape(f):
            f = np.asarray(f, dtype=float)
            return (8.0 * np.pi * P / b) * np.exp(-4.0 * np.pi**2 * f**2 / b) \
                * np.cos(np.pi * f * dt) ** 2

        total = 2.0 * P * math.sqrt(math.pi / b) * (1.0 + math.exp(-b * dt * dt / 4.0))
        return shape, total

    T = spec.pulse_width_s

    def shape(f):
        f = np.asarray(f, dtype=float)
        return P * T**2 * np.sinc(T * f) ** 2

    return shape, P * T


def _half_extent(spec: PulseTrainSpec) -> float:
    """One-sided spectral extent beyond which the pulse PSD is negligible.

    Gaussian pair: the -60 dB point of the Gaussian envelope.  Rectangle:
    the envelope decays only as 1/f^2, so use the 99.9%-energy half width
    (tail fraction of sinc^2 beyond F is ~1/(pi^2 T F)).
    """
    if spec.kind is PulseKind.DME_PAIR:
        return math.sqrt(math.log(1e6) * spec.beta / (4.0 * math.pi**2))
    return 1e3 / (math.pi**2 * spec.pulse_width_s)


def analytic_psd(spec: PulseTrainSpec, rx_mean_power: float) -> AnalyticPsd:
    """PSD of the pulse train rescaled to a given receiver-side mean power.

    The spectral *shape* is the single-pulse energy spectrum shifted to the
    emitter offset; it is normalized so that its full integral equals
    ``rx_mean_power`` (the value a link budget predicts at the receiver).
    """
    if rx_mean_power <= 0:
        raise ValueError("rx_mean_power must be > 0")
    shape, total = _pulse_energy_spectrum(spec)
    scale = rx_mean_power / total
    f0 = spec.offset_hz

    def density(f):
        return scale * shape(np.asarray(f, dtype=float) - f0)

    return AnalyticPsd(
        eval=density,
        mean_power=rx_mean_power,
        center_hz=f0,
        half_extent_hz=_half_extent(spec),
    )


def minimum_sample_rate(spec: PulseTrainSpec) -> float:
    """Smallest sample rate accepted by sample_pulse_train.

    Twice the offset-shifted occupied-band edge, where the band edge is the
    -60 dB envelope point for Gaussian pairs and six sinc lobes (>98% of the
    pulse energy) for rectangles.  Rates below this alias the train into the
    band of interest.
    """
    if spec.kind is PulseKind.DME_PAIR:
        edge = _half_extent(spec)
    else:
        edge = 6.0 / spec.pulse_width_s
    return 2.0 * (abs(spec.offset_hz) + edge)


def poisson_pulse_starts(spec: PulseTrainSpec, duration: float,
                         rng: np.random.Generator) -> np.ndarray:
    """Poisson start times over [-pulse_duration, duration), sorted.

    Starts before zero are included so that pulses reaching into the window
    are not lost; the count is Poisson with the correspondingly enlarged
    exposure.
    """
    d = pair_duration(spec)
    count = rng.poisson(spec.rate_ppps * (duration + d))
    return np.sort(rng.uniform(-d, duration, size=count))


def sample_pulse_train(
    spec: PulseTrainSpec,
    duration: float,
    sample_rate: float,
    seed,
    check_duration: bool = True,
) -> np.ndarray:
    """Render the train over [0, duration) at complex baseband.

    Pulse starts are Poisson with intensity rate_ppps; pulses that begin
    before t = 0 but reach into the window are included, so the output is
    statistically stationary.  Amplitudes of overlapping pulses add
    coherently; the whole train rides on the offset carrier with a random
    initial phase.  Deterministic for a fixed seed.
    """
    if sample_rate < minimum_sample_rate(spec):
        raise UnderSamplingError(
            f"sample_rate {sample_rate:g} Hz below minimum "
            f"{minimum_sample_rate(spec):g} Hz for this emitter"
        )
    if check_duration and spec.rate_ppps > 0 and duration < 100.0 / spec.rate_ppps:
        raise ValueError("duration under 100 mean inter-arrival times")

    n = int(round(duration * sample_rate))
    rng = np.random.default_rng(seed)
    if spec.rate_ppps == 0.0 or spec.peak_power_w == 0.0:
        return np.zeros(n, dtype=complex)

    starts = poisson_pulse_starts(spec, duration, rng)
    phase0 = rng.uniform(0.0, 2.0 * np.pi)

    if spec.kind is PulseKind.DME_PAIR:
        env = _kernels.render_gauss_pairs(n, sample_rate, starts,
                                          spec.beta, spec.delta_t_s)
    else:
        env = _kernels.render_rects(n, sample_rate, starts, spec.pulse_width_s)
    env = env * np.sqrt(spec.peak_power_w)

    t = np.arange(n) / sample_rate
    return env * np.exp(1j * (2.0 * np.pi * spec.offset_hz * t + phase0))
