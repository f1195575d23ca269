import numpy as np
import pytest

from specshape.grid import InterferenceProfile, build_grid
from specshape.waterfill import AllocationRequest, solve_waterfill
from specshape.waveform import (
    WeightVector,
    fbmc_synthesize,
    measure_psd,
    ofdm_demodulate,
    ofdm_modulate,
    phydyas_prototype,
    weights_from_allocation,
)

NOISE = 1e-20


def shaped_allocation(n=128, p_total=1.0):
    g = build_grid(n, 1e6)
    profile = InterferenceProfile(np.zeros(n), NOISE, g.spacing_hz * NOISE)
    return g, solve_waterfill(AllocationRequest(profile, g, p_total, 1.0))


class TestWeights:
    def test_equal_power_weights(self):
        g, alloc = shaped_allocation()
        w = weights_from_allocation(alloc)
        expected = np.sqrt(1.0 / alloc.n_active)
        np.testing.assert_allclose(w.weights[alloc.active], expected, rtol=1e-12)
        assert np.all(w.weights[~alloc.active] == 0.0)

    def test_total_power_identity(self):
        g, alloc = shaped_allocation(p_total=3.7)
        assert weights_from_allocation(alloc).total_power_w == pytest.approx(
            3.7, rel=1e-12)

    def test_empty_allocation_weights(self):
        from specshape.waterfill import Allocation
        empty = Allocation(np.zeros(16, bool), np.zeros(16), 0.0, 0.0, 0.0, 0)
        assert np.all(weights_from_allocation(empty).weights == 0.0)


class TestOfdm:
    def test_single_subcarrier_is_a_tone(self):
        N = 64
        w = np.zeros(N)
        n_active = 40                     # 1-based index 41, offset +8 bins
        w[n_active] = 2.0
        syms = np.zeros(N, complex)
        syms[n_active] = 1.0
        block = ofdm_modulate(syms, WeightVector(w))
        k = n_active - N // 2             # bins relative to DC
        m = np.arange(N)
        expected = 2.0 / np.sqrt(N) * np.exp(2j * np.pi * k * m / N)
        np.testing.assert_allclose(block, expected, atol=1e-12)

    def test_parseval(self):
        rng = np.random.default_rng(5)
        N = 128
        w = rng.uniform(0.0, 1.0, N)
        syms = (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2)
        block = ofdm_modulate(syms, WeightVector(w))
        assert np.sum(np.abs(block) ** 2) == pytest.approx(
            np.sum(np.abs(w * syms) ** 2), rel=1e-12)

    def test_series_power_matches_allocation(self):
        # physical-scale series carries sum(P_n) within 1%
        g, alloc = shaped_allocation(p_total=2.0)
        wv = weights_from_allocation(alloc)
        N = g.n_subcarriers
        rng = np.random.default_rng(7)
        blocks = [ofdm_modulate(
            (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2),
            wv) * np.sqrt(N) for _ in range(3000)]
        series = np.concatenate(blocks)
        assert np.mean(np.abs(series) ** 2) == pytest.approx(2.0, rel=0.01)

    def test_round_trip_identity(self):
        rng = np.random.default_rng(6)
        N = 128
        w = rng.uniform(0.1, 1.0, N)
        syms = (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2)
        for cp, ovs in ((0.0, 1), (0.125, 1), (0.171875, 4)):
            block = ofdm_modulate(syms, WeightVector(w), cp, oversample=ovs)
            out = ofdm_demodulate(block, N, oversample=ovs, cp_fraction=cp)
            np.testing.assert_allclose(out, w * syms, rtol=1e-10, atol=1e-12)

    def test_reference_numerology_timing(self):
        # 64 subcarriers at 9.765625 kHz: 102.4 us core, 17.6 us guard,
        # 120 us total symbol
        df = 0.625e6 / 64
        core = 1.0 / df
        assert core == pytest.approx(102.4e-6, rel=1e-12)
        cp = 17.6e-6 / core
        assert (1.0 + cp) * core == pytest.approx(120e-6, rel=1e-12)
        block = ofdm_modulate(np.zeros(64, complex),
                              WeightVector(np.zeros(64)), cp, oversample=4)
        assert len(block) == 64 * 4 + round(cp * 64 * 4)

    def test_cp_range_validated(self):
        with pytest.raises(ValueError):
            ofdm_modulate(np.zeros(16, complex), WeightVector(np.zeros(16)), 0.3)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ofdm_modulate(np.zeros(8, complex), WeightVector(np.zeros(16)))


class TestPrototype:
    def test_symmetry(self):
        proto = phydyas_prototype(64)
        taps = proto.taps
        np.testing.assert_allclose(taps[1:], taps[1:][::-1], rtol=1e-12)

    def test_unit_dc_response(self):
        proto = phydyas_prototype(64)
        assert proto.taps.sum() == pytest.approx(1.0, rel=1e-12)

    def test_edge_tap_vanishes(self):
        proto = phydyas_prototype(64)
        assert abs(proto.taps[0]) < 1e-5 * proto.taps.max()

    def test_overlap_factor_recorded(self):
        assert phydyas_prototype(32).overlap_factor == 4


class TestFbmc:
    def test_zero_in_zero_out(self):
        N = 64
        proto = phydyas_prototype(N)
        out = fbmc_synthesize(np.zeros((8, N)), WeightVector(np.zeros(N) + 1.0),
                              proto)
        assert np.all(out == 0.0)

    def test_bad_stream_length(self):
        N = 64
        proto = phydyas_prototype(N)
        with pytest.raises(ValueError):
            fbmc_synthesize(np.zeros(N + 3), WeightVector(np.ones(N)), proto)

    def test_mean_power_matches_weights(self):
        rng = np.random.default_rng(8)
        N = 64
        proto = phydyas_prototype(N)
        w = np.zeros(N)
        w[20:44] = rng.uniform(0.5, 1.5, 24)
        x = rng.choice([-1.0, 1.0], size=(600, N))
        out = fbmc_synthesize(x, WeightVector(w), proto)
        # trim filter ramp-up/down transients
        core = out[2 * proto.overlap_factor * N:-2 * proto.overlap_factor * N]
        assert np.mean(np.abs(core) ** 2) == pytest.approx(
            np.sum(w**2), rel=0.01)

    def test_single_subcarrier_confinement(self):
        # one active tone: nearly all power within ~2 subcarrier spacings,
        # sidelobes at the next-but-one subcarrier below -40 dB
        N = 64
        fs = 1e6
        df = fs / N
        proto = phydyas_prototype(N)
        w = np.zeros(N)
        idx = 40
        w[idx] = 1.0
        rng = np.random.default_rng(9)
        x = np.zeros((2000, N))
        x[:, idx] = rng.choice([-1.0, 1.0], size=2000)
        out = fbmc_synthesize(x, WeightVector(w), proto)
        f, p = measure_psd(out, fs, 8 * N)
        f0 = (idx - N // 2) * df
        peak = p[np.abs(f - f0) < df / 4].max()
        far = p[np.abs(f - f0) > 2.0 * df]
        assert 10 * np.log10(far.max() / peak) < -40.0

    def test_lower_out_of_band_than_ofdm(self):
        g, alloc = shaped_allocation()
        wv = weights_from_allocation(alloc)
        N = g.n_subcarriers
        rng = np.random.default_rng(10)
        proto = phydyas_prototype(N)

        x = rng.choice([-1.0, 1.0], size=(1200, N))
        fbmc = fbmc_synthesize(x, wv, proto)
        f_fb, p_fb = measure_psd(fbmc, 1e6, 2 * N)

        blocks = [ofdm_modulate(
            (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2),
            wv) * np.sqrt(N) for _ in range(600)]
        ofdm = np.concatenate(blocks)
        f_of, p_of = measure_psd(ofdm, 1e6, 2 * N)

        # occupied band is the middle half; compare leakage beyond +-330 kHz
        oob_fb = p_fb[np.abs(f_fb) > 3.3e5].sum()
        oob_of = p_of[np.abs(f_of) > 3.3e5].sum()
        assert oob_fb < oob_of


class TestSeriesFiles:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(20)
        from specshape.waveform import read_series, write_series
        x = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
        p = tmp_path / "series.f64"
        write_series(p, x, 4e6)
        y, fs = read_series(p)
        assert fs == 4e6
        np.testing.assert_array_equal(x, y)


class TestMeasurePsd:
    def test_white_noise_is_flat_at_the_right_level(self):
        rng = np.random.default_rng(11)
        fs = 1e6
        n = 400_000
        power = 2.5
        x = np.sqrt(power / 2) * (rng.standard_normal(n)
                                  + 1j * rng.standard_normal(n))
        f, p = measure_psd(x, fs, 512)
        np.testing.assert_allclose(p.mean(), power / fs, rtol=0.02)
        assert p.max() / p.min() < 2.0

    def test_integral_matches_series_power(self):
        rng = np.random.default_rng(12)
        fs = 4e6
        x = (rng.standard_normal(100_000) + 1j * rng.standard_normal(100_000))
        f, p = measure_psd(x, fs, 1024)
        total = np.sum(p) * (f[1] - f[0])
        assert total == pytest.approx(np.mean(np.abs(x) ** 2), rel=0.02)

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            measure_psd(np.zeros(100, complex), 1e6, 64)

    def test_nulled_subcarriers_are_deep(self):
        # density exactly at a nulled subcarrier's center sits at least 30 dB
        # (OFDM) / 50 dB (filter bank) below the active-subcarrier average;
        # centers must be sampled exactly (the sinc skirts of neighbors null
        # there), so nfft is a multiple of N and exact-center bins are used
        g, alloc = shaped_allocation()
        wv = weights_from_allocation(alloc)
        N = g.n_subcarriers
        rng = np.random.default_rng(13)

        def center_bins(f):
            sel_active = np.zeros(len(f), bool)
            sel_null = np.zeros(len(f), bool)
            for i in range(N):
                hit = np.isclose(f, g.centers_hz[i], atol=0.5)
                if alloc.active[i]:
                    sel_active |= hit
                else:
                    sel_null |= hit
            return sel_active, sel_null

        blocks = [ofdm_modulate(
            (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2),
            wv) * np.sqrt(N) for _ in range(4000)]
        f, p = measure_psd(np.concatenate(blocks), 1e6, 64 * N)
        act, nul = center_bins(f)
        ratio_db = 10 * np.log10(p[nul].max() / p[act].mean())
        assert ratio_db < -30.0

        proto = phydyas_prototype(N)
        x = rng.choice([-1.0, 1.0], size=(12000, N))
        fb = fbmc_synthesize(x, wv, proto)
        f2, p2 = measure_psd(fb, 1e6, 96 * N)
        act2, nul2 = center_bins(f2)
        ratio2_db = 10 * np.log10(p2[nul2].max() / p2[act2].mean())
        assert ratio2_db < -50.0
