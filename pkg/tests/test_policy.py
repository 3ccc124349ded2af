import math

import pytest

from repeaterscope.bellstate import dejmps, secret_fraction
from repeaterscope.params import ChainParams
from repeaterscope.policy import (
    DecisionRule,
    Schedule,
    ScheduleError,
    build_schedule,
    default_thresholds,
    schedule_from_bits,
    schedule_halvings,
)


def perfect_params(n_segments=4, channels=8):
    return ChainParams(
        total_distance_km=100.0,
        n_segments=n_segments,
        channels=channels,
        eta_c=1.0,
        eps_g=0.0,
        t2_s=math.inf,
        pi0_override=1.0,
    )


def lossy_params(**kw):
    defaults = dict(
        total_distance_km=200.0, n_segments=4, channels=16, eta_c=0.9, eps_g=1e-3
    )
    defaults.update(kw)
    return ChainParams(**defaults)


class TestDecisionRule:
    def test_skr_takes_no_threshold(self):
        with pytest.raises(ValueError):
            DecisionRule(kind="skr", f_th=0.9)

    def test_fth_requires_threshold(self):
        with pytest.raises(ValueError):
            DecisionRule(kind="fth")

    def test_threshold_range(self):
        with pytest.raises(ValueError):
            DecisionRule.fidelity_threshold(0.2)
        DecisionRule.fidelity_threshold(0.25)  # floor value is allowed


class TestSchedule:
    def test_serialization_format(self):
        sched = Schedule((1, 0, 1, 0, 0, 0), (2, 2, 2, 1, 1, 1))
        assert sched.serialize() == "D=10100 R=2,2,2,1,1,1"

    def test_parse_roundtrip(self):
        sched = Schedule((1, 0, 1, 0, 0, 0), (2, 2, 2, 1, 1, 1))
        assert Schedule.parse(sched.serialize()) == sched

    def test_final_level_must_not_distill(self):
        with pytest.raises(ValueError):
            Schedule((0, 1), (2, 2))

    def test_thresholds_nonincreasing(self):
        with pytest.raises(ValueError):
            Schedule((0, 0), (1, 2))

    def test_threshold_floor_under_pending_distillation(self):
        with pytest.raises(ValueError):
            Schedule((1, 0), (1, 1))

    def test_halvings(self):
        assert schedule_halvings(Schedule((1, 1, 0, 0), (2, 2, 1, 1))) == 2
        assert schedule_halvings(Schedule((0, 0), (1, 1))) == 0


class TestDefaultThresholds:
    def test_no_distillation(self):
        assert default_thresholds((0, 0, 0)) == (1, 1, 1)

    def test_two_up_to_last_distilling_level(self):
        assert default_thresholds((1, 0, 1, 0, 0)) == (2, 2, 2, 1, 1)


class TestBuildSchedule:
    def test_perfect_operations_never_distill_skr(self):
        build = build_schedule(perfect_params(), DecisionRule.skr())
        assert build.schedule.d_bits == (0, 0, 0)

    def test_perfect_operations_never_distill_fth(self):
        build = build_schedule(perfect_params(), DecisionRule.fidelity_threshold(0.95))
        assert build.schedule.d_bits == (0, 0, 0)

    def test_fth_triggers_when_swap_degrades_below_threshold(self):
        # noiseless gates, elementary fidelity 0.96: one swap lands at
        # 0.96^2 + 0.04^2 / 3 = 0.922133... < 0.95, so level 1 distills
        params = ChainParams(
            total_distance_km=100.0,
            n_segments=4,
            channels=16,
            eta_c=1.0,
            eps_g=0.0,
            t2_s=math.inf,
            pi0_override=0.9,
            elementary_fidelity_override=0.96,
        )
        build = build_schedule(params, DecisionRule.fidelity_threshold(0.95))
        assert build.schedule.d_bits[0] == 0
        assert build.schedule.d_bits[1] == 1
        assert build.states_in[1].fidelity == pytest.approx(
            0.96**2 + 0.04**2 / 3, abs=1e-12
        )

    def test_fth_floor_threshold_never_distills(self):
        build = build_schedule(lossy_params(), DecisionRule.fidelity_threshold(0.25))
        assert build.schedule.d_bits == (0, 0, 0)

    def test_skr_decision_is_argmax_of_recorded_values(self):
        for params in (lossy_params(), lossy_params(n_segments=16, channels=64)):
            build = build_schedule(params, DecisionRule.skr())
            for decision in build.decisions:
                if decision.level == params.n_levels or not decision.feasible:
                    assert not decision.chose_distill
                else:
                    assert decision.chose_distill == (
                        decision.value_distill > decision.value_keep
                    )

    def test_deterministic(self):
        a = build_schedule(lossy_params(), DecisionRule.skr())
        b = build_schedule(lossy_params(), DecisionRule.skr())
        assert a.schedule == b.schedule
        assert a.d_probs == b.d_probs
        assert [s.coeffs for s in a.states_out] == [s.coeffs for s in b.states_out]

    def test_records_dejmps_success_for_level_states(self):
        build = build_schedule(lossy_params(), DecisionRule.skr())
        for level, state in enumerate(build.states_in):
            d, _ = dejmps(state, state, lossy_params().noise())
            assert build.d_probs[level] == pytest.approx(d, abs=1e-15)

    def test_skr_values_are_fraction_times_expectation(self):
        build = build_schedule(lossy_params(), DecisionRule.skr())
        first = build.decisions[0]
        # undistilled branch at level 0: fraction of the entering state times
        # the conditional mean of the truncated binomial
        params = lossy_params()
        from repeaterscope.pmfengine import elementary_pmf, pmf_mean, truncate_renormalize

        reset, conditional = truncate_renormalize(
            elementary_pmf(params.channels, build.pi0), 1
        )
        expected = (
            secret_fraction(build.states_in[0])
            * (1 - reset) ** params.n_segments
            * pmf_mean(conditional)
        )
        assert first.value_keep == pytest.approx(expected, rel=1e-12)


class TestScheduleFromBits:
    def test_forced_distillation_halves_budget(self):
        build = schedule_from_bits(perfect_params(channels=8), (1, 0, 0))
        assert build.schedule.d_bits == (1, 0, 0)
        assert build.schedule.r_thresholds == (2, 1, 1)
        assert len(build.recursion.levels[1].conditional) == 5  # budget 4

    def test_infeasible_budget_names_level(self):
        with pytest.raises(ScheduleError, match="level 1"):
            schedule_from_bits(perfect_params(channels=2), (1, 1, 0))

    def test_explicit_thresholds_respected(self):
        build = schedule_from_bits(perfect_params(), (0, 0, 0), (0, 0, 0))
        assert build.schedule.r_thresholds == (0, 0, 0)

    def test_distillation_hold_dephases_state(self):
        params = lossy_params(t2_s=1e-4)  # exaggerate memory noise
        with_distill = schedule_from_bits(params, (1, 0, 0))
        no_decoherence = schedule_from_bits(
            ChainParams(**{**params.__dict__, "decoherence": False}), (1, 0, 0)
        )
        assert (
            with_distill.states_out[0].fidelity
            < no_decoherence.states_out[0].fidelity
        )


class TestHolds:
    def test_heralding_and_distillation_holds(self):
        params = lossy_params(total_distance_km=4.0)  # l0 = 1 km
        build = schedule_from_bits(params, (1, 1, 0))
        herald = 1.0 / 200_000.0
        assert build.holds_s[0] == pytest.approx(herald + herald, abs=1e-18)
        assert build.holds_s[1] == pytest.approx(2 * herald, abs=1e-18)
        assert build.holds_s[2] == 0.0

    def test_all_zero_schedule_has_heralding_only(self):
        build = schedule_from_bits(lossy_params(), (0, 0, 0))
        assert build.holds_s[0] > 0.0
        assert build.holds_s[1] == build.holds_s[2] == 0.0
