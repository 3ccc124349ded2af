import math
from itertools import product

import numpy as np
import pytest

from repeaterscope.bellstate import secret_fraction
from repeaterscope.csvio import report_row
from repeaterscope.params import ChainParams
from repeaterscope.policy import DecisionRule, Schedule
from repeaterscope.twoway import TimingModel, build_timing, evaluate_2gnc, evaluate_mtp


def perfect_params(n_segments=2, channels=4, pi0=1.0):
    return ChainParams(
        total_distance_km=100.0,
        n_segments=n_segments,
        channels=channels,
        eta_c=1.0,
        eps_g=0.0,
        t2_s=math.inf,
        pi0_override=pi0,
    )


def lossy_params(**kw):
    defaults = dict(
        total_distance_km=200.0, n_segments=4, channels=16, eta_c=0.9, eps_g=1e-3
    )
    defaults.update(kw)
    return ChainParams(**defaults)


class TestChainParams:
    def test_xi_defaults_to_quarter_gate_error(self):
        assert lossy_params().xi == pytest.approx(2.5e-4, abs=1e-18)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            ChainParams(total_distance_km=100, n_segments=3, channels=4)

    def test_rejects_oversized_channel_count(self):
        with pytest.raises(ValueError):
            ChainParams(total_distance_km=100, n_segments=2, channels=2048)

    def test_rejects_off_menu_fidelity_coeff(self):
        with pytest.raises(ValueError):
            ChainParams(
                total_distance_km=100, n_segments=2, channels=4, link_fidelity_coeff=1.5
            )

    def test_both_fidelity_coefficients_exposed(self):
        for coeff in (1.125, 1.25):
            params = lossy_params(link_fidelity_coeff=coeff)
            assert params.elementary_fidelity == pytest.approx(1 - coeff * 1e-3)

    def test_elementary_pi0_from_loss_model(self):
        params = lossy_params(total_distance_km=80.0)  # l0 = 20 km
        assert params.pi0() == pytest.approx(0.5 * 0.81 * math.exp(-1), abs=1e-15)


class TestEvaluateMtpPerfect:
    def test_perfect_chain_delivers_all_channels(self):
        report = evaluate_mtp(perfect_params(n_segments=2, channels=4))
        assert report.fidelity == 1.0
        assert report.skr_per_burst == 4.0
        assert report.skr_per_channel_use == 1.0
        assert np.all(report.reset_profile.f == 0.0)

    def test_forced_halvings_divide_yield(self):
        report = evaluate_mtp(perfect_params(n_segments=4, channels=8), d_bits=(1, 1, 0))
        assert report.skr_per_burst == 2.0
        assert report.fidelity == 1.0

    def test_min_of_binomials_example(self):
        # N=2, M=4, pi0=1/2, no distillation, perfect states: the burst
        # yield is E[min of two Binomial(4, 1/2)], enumerated over all
        # 16 x 16 joint outcomes
        expected = 0.0
        for i, j in product(range(16), repeat=2):
            left = bin(i).count("1")
            right = bin(j).count("1")
            expected += min(left, right) / 256.0
        report = evaluate_mtp(perfect_params(n_segments=2, channels=4, pi0=0.5))
        assert report.skr_per_burst == pytest.approx(expected, abs=1e-12)


class TestEvaluateMtpNoisy:
    def test_per_channel_use_bounded_by_secret_fraction(self):
        for params in (lossy_params(), lossy_params(n_segments=8, channels=64)):
            report = evaluate_mtp(params)
            assert report.skr_per_channel_use <= report.secret_fraction + 1e-12

    def test_reruns_are_identical(self):
        rows = [
            report_row(evaluate_mtp(lossy_params()), "test") for _ in range(2)
        ]
        assert rows[0] == rows[1]

    def test_final_state_consistent_with_secret_fraction(self):
        report = evaluate_mtp(lossy_params())
        assert report.secret_fraction == pytest.approx(
            secret_fraction(report.final_state), abs=1e-15
        )

    def test_forced_schedule_reported_as_forced(self):
        report = evaluate_mtp(lossy_params(), d_bits=(1, 0, 0))
        assert report.rule == "forced"
        assert report.schedule.d_bits == (1, 0, 0)

    def test_noise_off_keeps_fidelity_one_for_any_schedule(self):
        for bits in ((0, 0, 0), (1, 0, 0), (1, 1, 0)):
            report = evaluate_mtp(
                perfect_params(n_segments=4, channels=16, pi0=0.7), d_bits=bits
            )
            assert report.fidelity == 1.0

    def test_full_report_cross_checked_by_monte_carlo(self):
        # 200 km over four segments, sixteen channels, threshold rule:
        # delivered-pair expectation within 1% of the sampled process, and
        # the final-state fidelity identical across reruns
        from repeaterscope.mcoracle import estimate_pmf

        params = lossy_params(total_distance_km=200.0, n_segments=4, channels=16)
        rule = DecisionRule.fidelity_threshold(0.95)
        report = evaluate_mtp(params, rule)
        est = estimate_pmf(
            params.n_segments,
            params.channels,
            params.pi0(),
            report.schedule.d_bits,
            report.schedule.r_thresholds,
            report.build.d_probs,
            trials=400_000,
            seed=23,
        )
        assert est.mean_delivered == pytest.approx(report.expected_pairs, rel=0.01)
        rerun = evaluate_mtp(params, rule)
        assert rerun.fidelity == report.fidelity


class TestEvaluate2gnc:
    def test_perfect_single_channel(self):
        report = evaluate_2gnc(perfect_params(n_segments=2, channels=1))
        assert report.skr_per_burst == 1.0

    def test_success_probability_example(self):
        report = evaluate_2gnc(perfect_params(n_segments=2, channels=2, pi0=0.5))
        assert report.skr_per_burst == pytest.approx(0.5625, abs=1e-15)
        assert report.expected_pairs == pytest.approx(0.5625, abs=1e-15)

    def test_success_increases_with_channels_but_rate_peaks(self):
        params = lossy_params(n_segments=8, total_distance_km=400.0)
        success = []
        per_channel = []
        for m in (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024):
            report = evaluate_2gnc(
                ChainParams(**{**params.__dict__, "channels": m})
            )
            success.append(report.expected_pairs)
            per_channel.append(report.skr_per_channel_use)
        assert all(b > a for a, b in zip(success, success[1:]))
        best = per_channel.index(max(per_channel))
        assert 0 < best < len(per_channel) - 1  # interior optimum

    def test_mtp_dominates_at_equal_parameters(self):
        for params in (
            lossy_params(),
            lossy_params(n_segments=8, channels=64),
            lossy_params(total_distance_km=400.0, n_segments=16, channels=128),
        ):
            mtp = evaluate_mtp(params)
            gnc = evaluate_2gnc(params)
            assert mtp.skr_per_channel_use >= gnc.skr_per_channel_use


class TestTiming:
    def test_heralding_hold_microseconds(self):
        params = lossy_params(total_distance_km=4.0)  # l0 = 1 km
        assert params.heralding_hold_s() == pytest.approx(5e-6, abs=1e-18)

    def test_build_timing_matches_schedule(self):
        params = lossy_params(total_distance_km=4.0)
        sched = Schedule((1, 0, 0), (2, 1, 1))
        timing = build_timing(params, sched)
        assert timing.holds_s[0] == pytest.approx(5e-6 + 5e-6, abs=1e-18)
        assert timing.holds_s[1] == timing.holds_s[2] == 0.0

    def test_distillation_holds_grow_with_span(self):
        params = lossy_params(n_segments=8)
        sched = Schedule((1, 1, 1, 0), (2, 2, 2, 1))
        timing = build_timing(params, sched)
        distill_parts = [
            timing.holds_s[0] - params.heralding_hold_s(),
            timing.holds_s[1],
            timing.holds_s[2],
        ]
        assert distill_parts[0] < distill_parts[1] < distill_parts[2]

    def test_short_holds_barely_dephase(self):
        # T2 = 1 s versus microsecond holds: fidelity loss below 0.1%
        with_memory = evaluate_mtp(lossy_params(), d_bits=(1, 0, 0))
        without = evaluate_mtp(
            lossy_params(decoherence=False), d_bits=(1, 0, 0)
        )
        assert without.fidelity - with_memory.fidelity < 1e-3

    def test_hold_overrides_take_effect(self):
        params = lossy_params(herald_hold_override_s=0.0,
                              distill_hold_overrides_s=(0.0, 0.0, 0.0))
        timing = build_timing(params, Schedule((1, 0, 0), (2, 1, 1)))
        assert timing.holds_s == (0.0, 0.0, 0.0)

    def test_negative_hold_rejected(self):
        with pytest.raises(ValueError):
            TimingModel((-1.0,))
