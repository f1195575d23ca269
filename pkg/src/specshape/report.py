"""Figure-dataset bundles: PSD composites, BER curves, and threshold sweeps.

Each bundle is a set of named CSV tables plus a JSON manifest carrying the
inputs (config values and seed) that produced it, so re-running from the
manifest reproduces the tables byte for byte.  Rendering is out of scope;
the CSVs are meant for external plotting.
"""

from __future__ import annotations

import hashlib
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bersim import BerPoint, ldacs_flat_allocation, points_to_csv
from .grid import InterferenceProfile, SubcarrierGrid
from .linkbudget import (
    LinkScenario,
    allocation_request,
    free_space_loss_db,
    receiver_powers,
)
from .pulses import analytic_psd
from .waterfill import capacity_of, k_sweep, solve_waterfill
from .waveform import (
    measure_psd,
    ofdm_modulate,
    phydyas_prototype,
    fbmc_synthesize,
    weights_from_allocation,
)

__all__ = [
    "FigureBundle",
    "make_psd_figure",
    "make_capacity_figure",
    "make_ber_figure",
    "write_bundle",
    "LDACS_REFERENCE_SE",
]

#: published theoretical spectral efficiency of the fixed-band reference
#: system, shown as a constant row next to computed sweeps
LDACS_REFERENCE_SE = 6.04


@dataclass(frozen=True)
class FigureBundle:
    figure_id: str                   # psd | ber_curve | ksweep_ber | ksweep_capacity
    manifest: dict
    tables: dict[str, str]           # name -> CSV text


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(
            f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))
        buf.write("\n")
    return buf.getvalue()


def make_psd_figure(grid: SubcarrierGrid, scenario: LinkScenario,
                    k_threshold: float, seed: int = 0,
                    n_symbols: int = 400) -> FigureBundle:
    """Composite PSD dataset: interferer density, the shaped OFDM and
    filter-bank transmit spectra under the solved allocation, and the
    active-index list."""
    rx = receiver_powers(scenario)
    psds = [analytic_psd(spec, p)
            for spec, p in zip(scenario.intf_specs, rx.intf_mean_w)]
    req = allocation_request(scenario, grid, k_threshold)
    profile = req.profile
    alloc = solve_waterfill(req)
    weights = weights_from_allocation(alloc)

    # interferer analytic PSD on a fine frequency grid
    f_axis = np.arange(-grid.total_bandwidth_hz, grid.total_bandwidth_hz, 100.0)
    density = np.zeros_like(f_axis)
    for p in psds:
        density += p.eval(f_axis)
    intf_csv = _csv(["freq_hz", "density_w_per_hz"],
                    zip(f_axis.tolist(), density.tolist()))

    # measured transmit PSDs (oversampled x4 so out-of-band behavior shows)
    rng = np.random.default_rng(seed)
    N = grid.n_subcarriers
    L = 4
    fs = grid.total_bandwidth_hz * L
    blocks = []
    for _ in range(n_symbols):
        syms = (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2)
        blocks.append(ofdm_modulate(syms, weights, 0.0, oversample=L))
    # unitary blocks carry power sum(P)/N; rescale to the physical sum(P)
    ofdm_series = np.concatenate(blocks) * np.sqrt(N)
    f_ofdm, p_ofdm = measure_psd(ofdm_series, fs, 4 * N)

    proto = phydyas_prototype(N)
    reals = rng.choice([-1.0, 1.0], size=(2 * n_symbols, N))
    fbmc_series = fbmc_synthesize(reals, weights, proto)
    # filter-bank synthesis runs at the critical rate; measure there
    f_fbmc, p_fbmc = measure_psd(fbmc_series, grid.total_bandwidth_hz, N)

    tables = {
        "interferers.csv": intf_csv,
        "psd_ss_ofdm.csv": _csv(["freq_hz", "density_w_per_hz"],
                                zip(f_ofdm.tolist(), p_ofdm.tolist())),
        "psd_ss_fbmc.csv": _csv(["freq_hz", "density_w_per_hz"],
                                zip(f_fbmc.tolist(), p_fbmc.tolist())),
        "active_indices.csv": _csv(
            ["index", "f_n_hz", "P_n_w"],
            [(i, float(grid.centers_hz[i - 1]), float(alloc.powers_w[i - 1]))
             for i in alloc.active_indices()]),
        "interference_per_subcarrier.csv": _csv(
            ["index", "f_n_hz", "I_n_w", "noise_w"],
            [(i + 1, float(grid.centers_hz[i]), float(profile.interference_w[i]),
              profile.noise_per_subcarrier_w) for i in range(N)]),
    }
    manifest = {
        "figure_id": "psd",
        "seed": seed,
        "n_symbols": n_symbols,
        "k_threshold": k_threshold,
        "n_active": alloc.n_active,
        "scenario": _scenario_dict(scenario),
        "grid": {"n_subcarriers": N, "total_bandwidth_hz": grid.total_bandwidth_hz},
    }
    return FigureBundle("psd", manifest, tables)


def make_capacity_figure(grid: SubcarrierGrid, scenario: LinkScenario,
                         k_values) -> FigureBundle:
    """Spectral-efficiency sweep over the admission threshold, with the
    fixed-band reference shown both as its published constant and as the
    same-link computed value."""
    rx = receiver_powers(scenario)
    req = allocation_request(scenario, grid, k_values[0] if k_values else 1.0)
    rows = k_sweep(req.profile, grid, rx.signal_w, k_values)

    lgrid, lalloc = ldacs_flat_allocation(scenario.tx_power_w)
    att = 10.0 ** (-(free_space_loss_db(scenario.d_tx_rx_m, scenario.carrier_freq_hz)
                     - scenario.desired_gain_db) / 10.0)
    # interference-free reference at the same link: flat powers attenuated
    # to the receiver, thermal noise only in the denominator
    lprofile = InterferenceProfile(
        interference_w=np.zeros(lgrid.n_subcarriers),
        noise_density=rx.noise_density,
        noise_per_subcarrier_w=lgrid.spacing_hz * rx.noise_density,
    )
    from dataclasses import replace as _dc_replace
    _, ldacs_se = capacity_of(
        _dc_replace(lalloc, powers_w=lalloc.powers_w * att), lprofile, lgrid)

    table_rows = [
        (r["K"], r["n_active"], r["capacity_bps"],
         r["spectral_efficiency_bps_hz"],
         r["spectral_efficiency_bps_hz"] / LDACS_REFERENCE_SE)
        for r in rows
    ]
    tables = {
        "k_sweep.csv": _csv(
            ["K", "n_active", "capacity_bps", "spectral_efficiency_bps_hz",
             "ratio_vs_reference"],
            table_rows),
        "reference.csv": _csv(
            ["name", "spectral_efficiency_bps_hz"],
            [("fixed_band_published", LDACS_REFERENCE_SE),
             ("fixed_band_same_link", float(ldacs_se))]),
    }
    manifest = {
        "figure_id": "ksweep_capacity",
        "k_values": [float(k) for k in k_values],
        "scenario": _scenario_dict(scenario),
        "grid": {"n_subcarriers": grid.n_subcarriers,
                 "total_bandwidth_hz": grid.total_bandwidth_hz},
    }
    return FigureBundle("ksweep_capacity", manifest, tables)


def make_ber_figure(points: list[BerPoint], manifest_extra: dict,
                    figure_id: str = "ber_curve") -> FigureBundle:
    tables = {"ber.csv": points_to_csv(points)}
    manifest = {"figure_id": figure_id, **manifest_extra}
    return FigureBundle(figure_id, manifest, tables)


def _scenario_dict(s: LinkScenario) -> dict:
    return {
        "d_tx_rx_m": s.d_tx_rx_m,
        "d_intf_rx_m": s.d_intf_rx_m,
        "carrier_freq_hz": s.carrier_freq_hz,
        "tx_power_w": s.tx_power_w,
        "noise_temp_k": s.noise_temp_k,
        "noise_figure_db": s.noise_figure_db,
        "desired_gain_db": s.desired_gain_db,
        "intf_gain_db": s.intf_gain_db,
        "interferers": [sp.to_config() for sp in s.intf_specs],
    }


def write_bundle(bundle: FigureBundle, out_root: str | Path,
                 timestamp: str | None = None) -> Path:
    """Write tables and manifest under out/<figure_id>/<timestamp>/."""
    stamp = timestamp or time.strftime("%Y%m%dT%H%M%S")
    out_dir = Path(out_root) / bundle.figure_id / stamp
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = dict(bundle.manifest)
    manifest["tables"] = {
        name: hashlib.sha256(text.encode()).hexdigest()
        for name, text in bundle.tables.items()
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True))
    for name, text in bundle.tables.items():
        (out_dir / name).write_text(text)
    return out_dir
