import math
from dataclasses import replace

import numpy as np
import pytest

from specshape.bersim import (
    BerRunConfig,
    LDACS_CP_FRACTION,
    auto_oversample,
    awgn_ber_16qam,
    ldacs_flat_allocation,
    ldacs_grid,
    measure_bin_powers,
    run_ber_curve,
    run_ber_point,
)
from specshape.grid import InterferenceProfile, build_grid
from specshape.linkbudget import (
    LinkScenario,
    allocation_request,
    ebn0_db,
    noise_density_w_hz,
    receiver_powers,
)
from specshape.pulses import PulseKind, PulseTrainSpec
from specshape.waterfill import AllocationRequest, solve_waterfill


def clean_allocation(n=128):
    g = build_grid(n, 1e6)
    profile = InterferenceProfile(np.zeros(n), 1e-20, g.spacing_hz * 1e-20)
    return g, solve_waterfill(AllocationRequest(profile, g, 1.0, 1.0))


def awgn_scenario(ebn0_target, grid, alloc):
    """Scenario with no interferers whose distance lands at the target Eb/N0."""
    s = LinkScenario(d_tx_rx_m=1e4, d_intf_rx_m=1e5, intf_specs=[])
    from specshape.linkbudget import ebn0_to_distance_m
    d = ebn0_to_distance_m(s, alloc, grid.spacing_hz, ebn0_target)
    return replace(s, d_tx_rx_m=d)


def dme_pair(offset):
    return PulseTrainSpec(PulseKind.DME_PAIR, 1000.0, 2700.0, offset_hz=offset)


class TestAwgnFormula:
    def test_limits(self):
        assert awgn_ber_16qam(60.0) < 1e-300
        assert awgn_ber_16qam(-60.0) == pytest.approx(0.5, rel=1e-3)

    def test_monotone_decreasing(self):
        x = np.linspace(-10.0, 16.0, 200)
        y = np.array([awgn_ber_16qam(v) for v in x])
        assert np.all(np.diff(y) < 0.0)

    def test_golden_value_at_10db(self):
        # frozen after a 4e7-bit Monte-Carlo cross-check (z = -1.9)
        assert awgn_ber_16qam(10.0) == pytest.approx(1.75415061789273e-3,
                                                     rel=1e-12)


class TestEngineCalibration:
    def test_awgn_self_calibration(self):
        g, alloc = clean_allocation()
        for target, seed in ((4.0, 21), (8.0, 22)):
            s = awgn_scenario(target, g, alloc)
            cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=seed,
                               min_bits=300_000, min_errors=100, oversample=1)
            pt = run_ber_point(cfg)
            ref = awgn_ber_16qam(pt.ebn0_db)
            sigma = math.sqrt(ref * (1 - ref) / pt.bits)
            assert abs(pt.ber - ref) <= 3.0 * sigma

    def test_noise_power_per_subcarrier(self):
        g = build_grid(16, 1e6)
        s = LinkScenario(d_tx_rx_m=1e4, d_intf_rx_m=1e5, intf_specs=[],
                         noise_figure_db=3.6)
        p = measure_bin_powers(s, g, 100_000, seed=31, oversample=1,
                               include_interference=False)
        expected = g.spacing_hz * noise_density_w_hz(s)
        assert np.all(np.abs(p / expected - 1.0) < 0.01)

    def test_interferer_power_at_receiver(self):
        # total sampled interferer power within 5% of the link budget over
        # a 1 s equivalent
        from specshape.pulses import sample_pulse_train, train_mean_power
        s = LinkScenario(d_tx_rx_m=1e4, d_intf_rx_m=2e5,
                         intf_specs=[dme_pair(5e5)], noise_figure_db=3.6)
        rx = receiver_powers(s)
        spec = s.intf_specs[0]
        scale = math.sqrt(rx.intf_mean_w[0] / train_mean_power(spec))
        train = scale * sample_pulse_train(spec, 1.0, 2e6, seed=7)
        measured = float(np.mean(np.abs(train) ** 2))
        assert measured == pytest.approx(rx.intf_mean_w[0], rel=0.05)


class TestDeterminism:
    def test_identical_seed_identical_point(self):
        g, alloc = clean_allocation()
        s = awgn_scenario(6.0, g, alloc)
        cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=5,
                           min_bits=100_000, min_errors=10, oversample=1)
        a = run_ber_point(cfg)
        b = run_ber_point(cfg)
        assert a == b

    def test_seed_changes_point(self):
        g, alloc = clean_allocation()
        s = awgn_scenario(6.0, g, alloc)
        cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=5,
                           min_bits=100_000, min_errors=10, oversample=1)
        a = run_ber_point(cfg)
        b = run_ber_point(replace(cfg, seed=6))
        assert a.errors != b.errors

    def test_interference_path_deterministic(self):
        g = build_grid(128, 1e6)
        s = LinkScenario(d_tx_rx_m=60e3, d_intf_rx_m=200e3,
                         intf_specs=[dme_pair(-5e5), dme_pair(5e5)],
                         noise_figure_db=3.6, desired_gain_db=3.8)
        alloc = solve_waterfill(allocation_request(s, g, 1.0))
        cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=9,
                           min_bits=100_000, min_errors=10)
        assert run_ber_point(cfg) == run_ber_point(cfg)


class TestStoppingRule:
    def test_runs_past_min_bits_until_min_errors(self):
        g, alloc = clean_allocation()
        s = awgn_scenario(12.0, g, alloc)      # BER ~ 6e-5
        cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=3,
                           min_bits=100_000, min_errors=50, oversample=1)
        pt = run_ber_point(cfg)
        assert pt.errors >= 50
        assert pt.bits > 100_000
        assert not pt.capped

    def test_cap_flags_point(self):
        g, alloc = clean_allocation()
        s = awgn_scenario(14.0, g, alloc)      # BER ~ 3e-6: cap hits first
        cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=3,
                           min_bits=100_000, min_errors=10_000,
                           max_bits=400_000, oversample=1)
        pt = run_ber_point(cfg)
        assert pt.capped
        assert pt.bits <= 400_000 + 4 * alloc.n_active * cfg.chunk_symbols

    def test_empty_allocation_rejected(self):
        from specshape.waterfill import Allocation
        g = build_grid(16, 1e6)
        empty = Allocation(np.zeros(16, bool), np.zeros(16), 0.0, 0.0, 0.0, 0)
        with pytest.raises(ValueError):
            BerRunConfig(scenario=LinkScenario(1e4, 1e5, []), grid=g,
                         allocation=empty, seed=0)


class TestCurve:
    def test_monotone_in_distance_awgn(self):
        g, alloc = clean_allocation()
        s = awgn_scenario(2.0, g, alloc)
        base = s.d_tx_rx_m
        cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=17,
                           min_bits=200_000, min_errors=100, oversample=1)
        pts = run_ber_curve(cfg, [base, base / 2.0, base / 4.0])
        bers = [p.ber for p in pts]
        assert bers[0] > bers[1] > bers[2]
        ebn0s = [p.ebn0_db for p in pts]
        assert ebn0s[1] == pytest.approx(ebn0s[0] + 6.02, abs=0.01)

    def test_empty_distance_list(self):
        g, alloc = clean_allocation()
        s = awgn_scenario(4.0, g, alloc)
        cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=1,
                           min_bits=10_000, min_errors=1, oversample=1)
        assert run_ber_curve(cfg, []) == []


class TestLdacsBaseline:
    def test_grid_numerology(self):
        g = ldacs_grid()
        assert g.n_subcarriers == 64
        assert g.spacing_hz == pytest.approx(9765.625)
        _, alloc = ldacs_flat_allocation(1.0)
        assert alloc.n_active == 50
        assert LDACS_CP_FRACTION == pytest.approx(0.171875)

    def test_strong_pulsed_interference_floors(self):
        g, alloc = ldacs_flat_allocation(1.0)
        s = LinkScenario(d_tx_rx_m=60e3, d_intf_rx_m=10e3,
                         intf_specs=[dme_pair(-5e5), dme_pair(5e5)],
                         noise_figure_db=3.6, desired_gain_db=3.8)
        cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=13,
                           min_bits=200_000, min_errors=100,
                           cp_fraction=LDACS_CP_FRACTION)
        pt = run_ber_point(cfg)
        ref = awgn_ber_16qam(pt.ebn0_db)
        assert pt.ber > 10.0 * ref


class TestSurrogateMode:
    def test_surrogate_tracks_expected_degradation(self):
        # one subcarrier loaded with I = df*sigma^2 behaves ~3 dB worse there
        g, alloc = clean_allocation()
        s = awgn_scenario(8.0, g, alloc)
        surro = np.zeros(g.n_subcarriers)
        cfg0 = BerRunConfig(scenario=s, grid=g, allocation=alloc, seed=23,
                            min_bits=400_000, min_errors=100, oversample=1,
                            mode="surrogate", surrogate_interference_w=surro)
        clean = run_ber_point(cfg0)
        rx = receiver_powers(s)
        surro2 = np.where(alloc.active, g.spacing_hz * rx.noise_density, 0.0)
        cfg1 = replace(cfg0, surrogate_interference_w=surro2, point_index=1)
        dirty = run_ber_point(cfg1)
        # 3 dB SINR loss at Eb/N0 = 8 dB roughly triples the error rate
        assert dirty.ber > 2.0 * clean.ber
        ref3db = awgn_ber_16qam(clean.ebn0_db - 3.01)
        sigma = math.sqrt(ref3db / dirty.bits)
        assert abs(dirty.ber - ref3db) < 4.0 * sigma
        assert dirty.mode == "surrogate"

    def test_surrogate_requires_profile(self):
        g, alloc = clean_allocation()
        with pytest.raises(ValueError):
            BerRunConfig(scenario=LinkScenario(1e4, 1e5, []), grid=g,
                         allocation=alloc, seed=0, mode="surrogate")


class TestOversampling:
    def test_auto_covers_emitters(self):
        g = build_grid(128, 1e6)
        assert auto_oversample(g, []) == 2
        assert auto_oversample(g, [dme_pair(5e5)]) == 2
        rect = PulseTrainSpec(PulseKind.RECTANGULAR, 1000.0, 2700.0,
                              pulse_width_s=5.28432e-6, offset_hz=5e5)
        assert auto_oversample(g, [rect]) >= 4

    def test_ldacs_grid_oversample(self):
        g = ldacs_grid()
        assert auto_oversample(g, [dme_pair(5e5)]) * g.total_bandwidth_hz >= 1.7e6


class TestCiHonesty:
    def test_pooled_ber_inside_per_seed_ci(self):
        # across 100 seeds the pooled estimate falls inside each seed's 95%
        # interval at least 90 times
        g, alloc = clean_allocation()
        s = awgn_scenario(4.0, g, alloc)
        points = []
        for seed in range(100):
            cfg = BerRunConfig(scenario=s, grid=g, allocation=alloc,
                               seed=1000 + seed, min_bits=100_000,
                               min_errors=10, oversample=1)
            points.append(run_ber_point(cfg))
        pooled = sum(p.errors for p in points) / sum(p.bits for p in points)
        inside = sum(abs(p.ber - pooled) <= p.ci95_halfwidth for p in points)
        assert inside >= 90
