"""End-to-end evaluation of the multiplexed two-way protocol and 2G-NC.

``evaluate_mtp`` composes the schedule walk (state evolution + decision
rule), the exact count recursion and the cost counters into one report.
``evaluate_2gnc`` evaluates the single-success multiplexing baseline: no
distillation, one retained pair per segment, one network-wide swap round.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bellstate import BellDiagState, dephase, from_depolarized_fidelity, secret_fraction, swap
from .costs import CostReport, mtp_costs, normalize_per_secret_key, twognc_costs
from .params import ChainParams
from .pmfengine import ResetProfile, expected_pairs, twogn_c_success
from .policy import DecisionRule, Schedule, ScheduleBuild, build_schedule, schedule_from_bits


@dataclass(frozen=True)
class TimingModel:
    """Per-level memory holds (seconds) fed to the dephasing channel."""

    holds_s: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(h < 0 for h in self.holds_s):
            raise ValueError("holds must be nonnegative")

    @property
    def total_s(self) -> float:
        return sum(self.holds_s)


def build_timing(params: ChainParams, schedule: Schedule) -> TimingModel:
    """Heralding wait at level 0 plus an outcome-exchange wait per distillation."""
    holds = tuple(
        (params.heralding_hold_s() if i == 0 else 0.0)
        + (params.distillation_hold_s(i) if schedule.d_bits[i] else 0.0)
        for i in range(schedule.n_levels + 1)
    )
    return TimingModel(holds)


@dataclass(frozen=True)
class RunReport:
    """One architecture evaluated at one parameter point."""

    architecture: str
    distance_km: float
    n_segments: int
    channels: int
    eta_c: float
    eps_g: float
    xi: float
    t2_s: float
    rule: str
    f_th: float | None
    schedule: Schedule | None
    skr_per_burst: float
    skr_per_channel_use: float
    fidelity: float
    secret_fraction: float
    expected_pairs: float
    final_state: BellDiagState | None
    reset_profile: ResetProfile | None
    costs: CostReport
    timing: TimingModel | None = None
    build: ScheduleBuild | None = None

    def __post_init__(self) -> None:
        for name in ("skr_per_burst", "skr_per_channel_use", "expected_pairs"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def evaluate_mtp(
    params: ChainParams,
    rule: DecisionRule = DecisionRule.skr(),
    d_bits=None,
    r_thresholds=None,
) -> RunReport:
    """Evaluate the multiplexed two-way protocol.

    The schedule is fixed by ``rule`` unless explicit decision bits (and
    optionally thresholds) are imposed.
    """
    if d_bits is not None:
        build = schedule_from_bits(params, d_bits, r_thresholds)
        rule_name, f_th = "forced", None
    else:
        build = build_schedule(params, rule)
        rule_name, f_th = rule.kind, rule.f_th
    recursion = build.recursion
    n = params.n_levels
    delivered, _ = expected_pairs(recursion, n)
    final_state = build.states_out[n]
    fraction = secret_fraction(final_state)
    skr_burst = fraction * delivered
    costs = normalize_per_secret_key(mtp_costs(recursion, params), skr_burst)
    return RunReport(
        architecture="mtp",
        distance_km=params.total_distance_km,
        n_segments=params.n_segments,
        channels=params.channels,
        eta_c=params.eta_c,
        eps_g=params.eps_g,
        xi=params.xi,
        t2_s=params.t2_s,
        rule=rule_name,
        f_th=f_th,
        schedule=build.schedule,
        skr_per_burst=skr_burst,
        skr_per_channel_use=skr_burst / params.channels,
        fidelity=final_state.fidelity,
        secret_fraction=fraction,
        expected_pairs=delivered,
        final_state=final_state,
        reset_profile=recursion.profile,
        costs=costs,
        timing=TimingModel(build.holds_s),
        build=build,
    )


def evaluate_2gnc(params: ChainParams) -> RunReport:
    """Evaluate single-success multiplexing with a network-wide swap."""
    pi0 = params.pi0()
    success = twogn_c_success(params.channels, pi0, params.n_segments)
    state = from_depolarized_fidelity(params.elementary_fidelity)
    if params.decoherence:
        state = dephase(state, params.heralding_hold_s(), params.t2_s)
    elementary = state
    noise = params.noise()
    for _ in range(params.n_segments - 1):
        state = swap(state, elementary, noise)
    fraction = secret_fraction(state)
    skr_burst = fraction * success
    costs = normalize_per_secret_key(twognc_costs(params), skr_burst)
    return RunReport(
        architecture="2gnc",
        distance_km=params.total_distance_km,
        n_segments=params.n_segments,
        channels=params.channels,
        eta_c=params.eta_c,
        eps_g=params.eps_g,
        xi=params.xi,
        t2_s=params.t2_s,
        rule="",
        f_th=None,
        schedule=None,
        skr_per_burst=skr_burst,
        skr_per_channel_use=skr_burst / params.channels,
        fidelity=state.fidelity,
        secret_fraction=fraction,
        expected_pairs=success,
        final_state=state,
        reset_profile=None,
        costs=costs,
        timing=TimingModel((params.heralding_hold_s(),)),
    )
