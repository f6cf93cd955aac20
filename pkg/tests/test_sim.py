import math

import numpy as np
import pytest

from onebit_precoding import (
    AdmmConfig,
    CsiErrorModel,
    CsiSpec,
    Modulation,
    Precoder,
    SystemConfig,
    TrialSpec,
    build_constellation,
    corrupt_csi,
    detect,
    draw_channel,
    noise_variance_for_snr,
    run_point,
    run_trial,
    wilson_interval,
)


class TestNoiseVariance:
    def test_reference_points(self):
        assert noise_variance_for_snr(1.0, 0.0) == pytest.approx(1.0)
        assert noise_variance_for_snr(1.0, 10.0) == pytest.approx(0.1)
        assert noise_variance_for_snr(2.0, 3.0) == pytest.approx(
            2.0 * 10 ** -0.3)


class TestWilsonInterval:
    def test_contains_point_estimate(self):
        lo, hi = wilson_interval(7, 100)
        assert lo < 0.07 < hi

    def test_zero_errors_lower_bound(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == pytest.approx(0.0, abs=1e-12)
        assert 0.0 < hi < 0.05

    def test_empty_sample(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)

    def test_known_value(self):
        # textbook example: 10/50 at 95% -> approximately (0.112, 0.330)
        lo, hi = wilson_interval(10, 50)
        assert lo == pytest.approx(0.1124, abs=2e-3)
        assert hi == pytest.approx(0.3304, abs=2e-3)


class TestDrawChannel:
    def test_component_moments(self):
        rng = np.random.default_rng(0)
        H = draw_channel(40, 50, rng).entries
        comps = np.concatenate([H.real.ravel(), H.imag.ravel()])
        assert abs(np.mean(comps)) < 0.02
        assert abs(np.var(comps) - 1.0) < 0.02
        assert abs(np.mean(np.abs(H) ** 2) - 2.0) < 0.04

    def test_component_var_scaling(self):
        rng = np.random.default_rng(1)
        H = draw_channel(40, 50, rng, component_var=0.5).entries
        assert abs(np.mean(np.abs(H) ** 2) - 1.0) < 0.02


class TestCorruptCsi:
    def test_zero_delta_is_identity(self):
        rng = np.random.default_rng(2)
        H = draw_channel(4, 8, rng)
        out = corrupt_csi(H, CsiSpec(), rng)
        assert out is H

    def test_gaussian_blend_moments(self):
        rng = np.random.default_rng(3)
        H = draw_channel(60, 60, rng)
        spec = CsiSpec(delta=0.3, error_model=CsiErrorModel.GAUSSIAN)
        out = corrupt_csi(H, spec, rng).entries
        resid = out - 0.7 * H.entries
        # residual is 0.3 * CN(0,1): E|.|^2 = 0.09
        assert abs(np.mean(np.abs(resid) ** 2) - 0.09) < 0.01

    def test_uniform_error_component_variance(self):
        rng = np.random.default_rng(4)
        H = draw_channel(60, 60, rng)
        spec = CsiSpec(delta=0.5, error_model=CsiErrorModel.UNIFORM)
        out = corrupt_csi(H, spec, rng).entries
        resid = (out - 0.5 * H.entries) / 0.5
        # each real component of the error is (1/sqrt 3) U(-1,1): var 1/9,
        # bounded support
        comps = np.concatenate([resid.real.ravel(), resid.imag.ravel()])
        assert np.max(np.abs(comps)) <= 1.0 / np.sqrt(3.0) + 1e-12
        assert abs(np.var(comps) - 1.0 / 9.0) < 0.005

    def test_literal_blend_swaps_weights(self):
        rng = np.random.default_rng(5)
        H = draw_channel(60, 60, rng)
        spec = CsiSpec(delta=0.2, error_model=CsiErrorModel.GAUSSIAN,
                       literal_blend=True)
        out = corrupt_csi(H, spec, rng).entries
        resid = out - 0.2 * H.entries
        assert abs(np.mean(np.abs(resid) ** 2) - 0.64) < 0.05

    def test_validation(self):
        with pytest.raises(ValueError):
            CsiSpec(delta=0.6, error_model=CsiErrorModel.GAUSSIAN)
        with pytest.raises(ValueError):
            CsiSpec(delta=0.1)


class TestDetect:
    def test_qpsk_quadrants(self):
        const = build_constellation(Modulation.QPSK)
        y = np.array([3 + 2j, -1 + 0.1j, 0.2 - 5j, -2 - 2j])
        idx, bits = detect(y, 1.0, const)
        expected_signs = [(1, 1), (-1, 1), (1, -1), (-1, -1)]
        for i, (sr, si) in zip(idx, expected_signs):
            p = const.points[i]
            assert np.sign(p.real) == sr and np.sign(p.imag) == si

    def test_gain_compensation(self):
        const = build_constellation(Modulation.QAM16)
        rng = np.random.default_rng(6)
        idx_true = rng.integers(0, 16, 50)
        y = 3.7 * const.points[idx_true]
        idx, bits = detect(y, 3.7, const)
        np.testing.assert_array_equal(idx, idx_true)
        np.testing.assert_array_equal(bits, const.bit_table[idx_true])

    def test_rejects_nonpositive_gain(self):
        const = build_constellation(Modulation.QPSK)
        with pytest.raises(ValueError):
            detect(np.array([1 + 1j]), 0.0, const)


class TestAwgnCalibration:
    def test_qpsk_ber_matches_q_function(self):
        # direct AWGN transmission (no precoding): QPSK with unit-energy
        # symbols and per-component noise std sigma has bit error rate
        # Q(1/(sqrt(2) sigma))
        const = build_constellation(Modulation.QPSK)
        rng = np.random.default_rng(7)
        sigma2 = noise_variance_for_snr(1.0, 7.3)  # per complex symbol
        sigma = np.sqrt(sigma2 / 2.0)
        n = 200_000
        idx = rng.integers(0, 4, n)
        y = const.points[idx] + sigma * (rng.standard_normal(n)
                                         + 1j * rng.standard_normal(n))
        _, bits = detect(y, 1.0, const)
        errors = int(np.sum(bits != const.bit_table[idx]))
        ber = errors / (2 * n)
        arg = 1.0 / (np.sqrt(2.0) * sigma)
        expected = 0.5 * math.erfc(arg / np.sqrt(2.0))
        tol = 3.0 * np.sqrt(expected * (1 - expected) / (2 * n))
        assert abs(ber - expected) < tol


def small_spec(**kw):
    defaults = dict(
        sys=SystemConfig(2, 8, noise_variance=1.0),
        precoder=Precoder.ADMM,
        snr_db=5.0,
        seed=42,
        num_symbol_vectors=4,
        num_trials=12,
        admm=AdmmConfig(max_iters=150),
    )
    defaults.update(kw)
    return TrialSpec(**defaults)


class TestRunTrial:
    def test_deterministic_given_seed(self):
        spec = small_spec()
        a = run_trial(spec, 3)
        b = run_trial(spec, 3)
        assert a == b

    def test_trials_differ(self):
        spec = small_spec(num_symbol_vectors=20, snr_db=-6.0)
        a = run_trial(spec, 0)
        b = run_trial(spec, 1)
        assert a.bit_errors != b.bit_errors

    def test_counts_bits(self):
        spec = small_spec()
        r = run_trial(spec, 0)
        assert r.bits_sent == 4 * 2 * 2  # vectors * users * bits/symbol
        assert r.num_solves == 4 and r.iters_sum > 0

    def test_rank_deficient_channel_marks_trial_failed(self):
        # component_var = 0 draws the all-zero channel; the ZF inverse cannot
        # be built, and the trial must report failure instead of raising
        spec = small_spec(precoder=Precoder.ZF_Q, channel_component_var=0.0)
        r = run_trial(spec, 0)
        assert r.failed
        assert r.bits_sent == 0 and r.bit_errors == 0


class TestRunPoint:
    def test_worker_count_invariance(self):
        spec = small_spec()
        serial = run_point(spec, workers=1)
        parallel = run_point(spec, workers=4)
        assert serial.bit_errors == parallel.bit_errors
        assert serial.bits_sent == parallel.bits_sent
        assert serial.mean_iters == parallel.mean_iters
        assert serial.failures == parallel.failures

    def test_report_fields(self):
        spec = small_spec(precoder=Precoder.ZF_Q)
        rep = run_point(spec)
        assert rep.precoder == "zf_q"
        assert rep.trials == 12 and rep.failures == 0
        assert rep.bits_sent == 12 * 4 * 2 * 2
        assert rep.ci_lo <= rep.ber <= rep.ci_hi
        assert rep.mean_iters == 0.0  # linear precoders run no iterations
        assert rep.wall_time_s > 0

    def test_zfi_noiseless_regime_error_free(self):
        spec = small_spec(precoder=Precoder.ZFI, snr_db=60.0,
                          sys=SystemConfig(2, 8, noise_variance=1.0))
        rep = run_point(spec)
        assert rep.bit_errors == 0
