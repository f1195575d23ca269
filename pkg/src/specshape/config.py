"""Scenario configuration files (TOML) and override handling.

One file describes the grid, the link constants, the interferer families
(one emitter per listed offset), the allocator threshold, and the BER run
parameters.  Unknown keys are rejected so typos fail loudly; command-line
overrides of the form section.key=value are applied after parsing.
"""

from __future__ import annotations

import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .grid import SubcarrierGrid, build_grid
from .linkbudget import LinkScenario
from .pulses import PulseKind, PulseTrainSpec

__all__ = ["load_config", "apply_overrides", "build_scenario", "build_grid_from_config"]


class ConfigError(ValueError):
    pass


_SCHEMA = {
    "grid": {"n_subcarriers", "total_bandwidth_hz", "guard_fraction"},
    "link": {
        "carrier_freq_hz", "tx_power_w", "noise_temp_k", "noise_figure_db",
        "desired_gain_db", "intf_gain_db", "d_tx_rx_m", "d_intf_rx_m",
    },
    "interferers": None,  # nested tables validated separately
    "allocator": {"k_threshold"},
    "ber": {
        "min_bits", "min_errors", "max_bits", "distances_m", "chunk_symbols",
        "oversample", "seed",
    },
    "capacity": {"d_tx_rx_m", "d_intf_rx_m", "k_values"},
    "baseline": {"d_intf_rx_m_list", "total_power_w"},
}

_EMITTER_KEYS = {
    "kind", "peak_power_w", "rate_ppps", "beta", "delta_t_s",
    "pulse_width_s", "offsets_hz",
}


def load_config(path: str | Path) -> dict:
    """Parse and validate a scenario file."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    with open(p, "rb") as fh:
        raw = tomllib.load(fh)
    _validate(raw)
    return raw


def _validate(raw: dict) -> None:
    for section, table in raw.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        if section == "interferers":
            for family, emitter in table.items():
                bad = set(emitter) - _EMITTER_KEYS
                if bad:
                    raise ConfigError(
                        f"unknown keys in [interferers.{family}]: {sorted(bad)}")
            continue
        bad = set(table) - _SCHEMA[section]
        if bad:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(bad)}")


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply section.key=value strings on top of a parsed config."""
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in raw.items()}
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        key, value = item.split("=", 1)
        parts = key.split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        try:
            node[parts[-1]] = float(value)
        except ValueError:
            node[parts[-1]] = value
    _validate(out)
    return out


def build_grid_from_config(raw: dict) -> SubcarrierGrid:
    g = raw.get("grid", {})
    return build_grid(
        int(g.get("n_subcarriers", 128)),
        float(g.get("total_bandwidth_hz", 1e6)),
        float(g.get("guard_fraction", 0.25)),
    )


def _emitters(raw: dict, family: str) -> list[PulseTrainSpec]:
    table = raw.get("interferers", {})
    if family not in table:
        raise ConfigError(f"no [interferers.{family}] section in config")
    e = table[family]
    kind = PulseKind(e["kind"])
    specs = []
    for off in e.get("offsets_hz", [0.0]):
        kwargs = dict(
            kind=kind,
            peak_power_w=float(e["peak_power_w"]),
            rate_ppps=float(e["rate_ppps"]),
            offset_hz=float(off),
        )
        if kind is PulseKind.DME_PAIR:
            kwargs["beta"] = float(e.get("beta", 4.5e11))
            kwargs["delta_t_s"] = float(e.get("delta_t_s", 12e-6))
        else:
            kwargs["pulse_width_s"] = float(e["pulse_width_s"])
        specs.append(PulseTrainSpec(**kwargs))
    return specs


def build_scenario(raw: dict, family: str,
                   d_tx_rx_m: float | None = None,
                   d_intf_rx_m: float | None = None) -> LinkScenario:
    """LinkScenario from the [link] section plus one interferer family."""
    link = raw.get("link", {})
    return LinkScenario(
        d_tx_rx_m=float(d_tx_rx_m if d_tx_rx_m is not None
                        else link.get("d_tx_rx_m", 10e3)),
        d_intf_rx_m=float(d_intf_rx_m if d_intf_rx_m is not None
                          else link.get("d_intf_rx_m", 200e3)),
        intf_specs=_emitters(raw, family),
        carrier_freq_hz=float(link.get("carrier_freq_hz", 1e9)),
        tx_power_w=float(link.get("tx_power_w", 1.0)),
        noise_temp_k=float(link.get("noise_temp_k", 290.0)),
        noise_figure_db=float(link.get("noise_figure_db", 6.0)),
        desired_gain_db=float(link.get("desired_gain_db", 0.0)),
        intf_gain_db=float(link.get("intf_gain_db", 0.0)),
    )
