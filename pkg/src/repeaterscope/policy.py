"""Static per-level distillation schedules and abort thresholds.

The schedule is fixed before run time by a single forward pass over the
nesting levels.  At each level the pass knows the Bell-diagonal state the
pairs are in (swaps and memory holds applied), the distillation success
probability for that state, and the conditional count distribution, and it
picks the decision bit by one of two rules:

* secret-key-rate rule: distill iff it raises the product of secret-key
  fraction and expected surviving pair count at this level (ties keep the
  pairs undistilled);
* fidelity-threshold rule: distill iff the fidelity entering the level's
  decision point (after the previous swap and any decoherence) is below
  the threshold.

During the pass each level is provisionally truncated at 2 when its own
branch distills and at 1 otherwise, since later decisions are still
unknown.  The published thresholds are then tightened to 2 at every level
up to the last distilling one (a lineage with a single pair cannot feed a
later distillation round anyway, so this reshuffles abort accounting
between levels without changing what is delivered), and the count
recursion is rerun once with those final thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bellstate import (
    BellDiagState,
    DistillationUndefinedError,
    dejmps,
    dephase,
    from_depolarized_fidelity,
    secret_fraction,
    swap,
)
from .params import ChainParams
from .pmfengine import (
    CertainResetError,
    RecursionResult,
    distill_pmf,
    elementary_pmf,
    run_recursion,
    swap_pmf,
    truncate_renormalize,
)

MIN_DISTILL_THRESHOLD = 2


class ScheduleError(ValueError):
    """Raised when a schedule cannot be executed with the given budget."""


@dataclass(frozen=True)
class DecisionRule:
    """Distillation decision rule: ``skr`` or ``fth`` (with a threshold)."""

    kind: str
    f_th: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("skr", "fth"):
            raise ValueError(f"unknown decision rule {self.kind!r}")
        if self.kind == "fth":
            if self.f_th is None or not 0.25 <= self.f_th <= 1.0:
                raise ValueError("fidelity threshold must lie in [0.25, 1]")
        elif self.f_th is not None:
            raise ValueError("the skr rule takes no threshold")

    @classmethod
    def skr(cls) -> "DecisionRule":
        return cls(kind="skr")

    @classmethod
    def fidelity_threshold(cls, f_th: float) -> "DecisionRule":
        return cls(kind="fth", f_th=f_th)


@dataclass(frozen=True)
class Schedule:
    """Per-level decisions and abort thresholds, levels 0..n."""

    d_bits: tuple[int, ...]
    r_thresholds: tuple[int, ...]

    def __post_init__(self) -> None:
        d = tuple(int(b) for b in self.d_bits)
        r = tuple(int(t) for t in self.r_thresholds)
        if len(d) != len(r) or not d:
            raise ValueError("need one decision bit and one threshold per level")
        if any(b not in (0, 1) for b in d):
            raise ValueError("decision bits must be 0 or 1")
        if d[-1] != 0:
            raise ValueError("no distillation is allowed at the final level")
        if any(t < 0 for t in r):
            raise ValueError("thresholds must be nonnegative")
        if any(a < b for a, b in zip(r, r[1:])):
            raise ValueError("thresholds must be nonincreasing in level")
        for i, t in enumerate(r):
            if any(d[j] for j in range(i, len(d))) and t < MIN_DISTILL_THRESHOLD:
                raise ValueError(
                    f"threshold at level {i} must be >= {MIN_DISTILL_THRESHOLD} "
                    "while distillation is still scheduled"
                )
        object.__setattr__(self, "d_bits", d)
        object.__setattr__(self, "r_thresholds", r)

    @property
    def n_levels(self) -> int:
        return len(self.d_bits) - 1

    @property
    def halvings(self) -> int:
        return sum(self.d_bits)

    def serialize(self) -> str:
        """Line format ``D=<bits 0..n-1> R=<thresholds 0..n>``.

        The final level never distills, so its bit is left implicit.
        """
        bits = "".join(str(b) for b in self.d_bits[:-1]) or "0"
        return f"D={bits} R={','.join(str(t) for t in self.r_thresholds)}"

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        try:
            d_part, r_part = text.split()
            bits = [int(c) for c in d_part.removeprefix("D=")]
            thresholds = [int(t) for t in r_part.removeprefix("R=").split(",")]
        except Exception as exc:
            raise ValueError(f"unparseable schedule {text!r}") from exc
        if len(thresholds) == len(bits) + 1:
            bits = bits + [0]
        elif len(thresholds) == len(bits) == 1:
            bits = [0]
        return cls(tuple(bits), tuple(thresholds))


def schedule_halvings(schedule: Schedule) -> int:
    """Number of times the channel budget is halved by distillation."""
    return schedule.halvings


def default_thresholds(d_bits) -> tuple[int, ...]:
    """Tightest valid thresholds: 2 up to the last distilling level, then 1."""
    bits = tuple(int(b) for b in d_bits)
    last = max((i for i, b in enumerate(bits) if b), default=-1)
    return tuple(MIN_DISTILL_THRESHOLD if i <= last else 1 for i in range(len(bits)))


@dataclass(frozen=True)
class LevelDecision:
    """Diagnostics for one level's decision point."""

    level: int
    fidelity_in: float
    d_prob: float
    feasible: bool
    value_keep: float | None      # secret fraction x expected pairs, undistilled
    value_distill: float | None   # same, one distillation round applied
    chose_distill: bool


@dataclass(frozen=True)
class ScheduleBuild:
    """Schedule plus everything the walk computed along the way."""

    schedule: Schedule
    pi0: float
    states_in: tuple[BellDiagState, ...]   # entering each level's decision point
    states_out: tuple[BellDiagState, ...]  # after the level's decision
    d_probs: tuple[float, ...]
    decisions: tuple[LevelDecision, ...]
    recursion: RecursionResult
    holds_s: tuple[float, ...]


def _maybe_dephase(state: BellDiagState, t_s: float, params: ChainParams) -> BellDiagState:
    if not params.decoherence or t_s == 0.0:
        return state
    return dephase(state, t_s, params.t2_s)


def _tail_mean(p, r_min: int) -> float:
    return float(sum(k * v for k, v in enumerate(p) if k >= r_min))


def build_schedule(params: ChainParams, rule: DecisionRule) -> ScheduleBuild:
    """Fix the decision bits by the given rule, level by level."""
    return _walk(params, rule=rule, forced_bits=None, forced_thresholds=None)


def schedule_from_bits(
    params: ChainParams, d_bits, r_thresholds=None
) -> ScheduleBuild:
    """Walk the chain with an externally imposed schedule."""
    bits = tuple(int(b) for b in d_bits)
    thresholds = None if r_thresholds is None else tuple(int(t) for t in r_thresholds)
    return _walk(params, rule=None, forced_bits=bits, forced_thresholds=thresholds)


def _walk(
    params: ChainParams,
    rule: DecisionRule | None,
    forced_bits: tuple[int, ...] | None,
    forced_thresholds: tuple[int, ...] | None,
) -> ScheduleBuild:
    n = params.n_levels
    n_segments = params.n_segments
    noise = params.noise()
    pi0 = params.pi0()
    if forced_bits is not None and len(forced_bits) != n + 1:
        raise ScheduleError(f"schedule needs one bit per level 0..{n}")

    state = from_depolarized_fidelity(params.elementary_fidelity)
    state = _maybe_dephase(state, params.heralding_hold_s(), params)

    pre = elementary_pmf(params.channels, pi0)
    survival = 1.0
    budget = params.channels

    d_bits: list[int] = []
    d_probs: list[float] = []
    states_in: list[BellDiagState] = []
    states_out: list[BellDiagState] = []
    decisions: list[LevelDecision] = []

    for i in range(n + 1):
        states_in.append(state)
        segments = n_segments >> i

        try:
            d_i, distilled_state = dejmps(state, state, noise)
        except DistillationUndefinedError:
            d_i, distilled_state = 0.0, None

        feasible = i < n and budget >= MIN_DISTILL_THRESHOLD and distilled_state is not None

        keep_reset, keep_pmf = truncate_renormalize(pre, 1)
        keep_survival = survival * (1.0 - keep_reset) ** segments
        value_keep = secret_fraction(state) * keep_survival * _tail_mean(keep_pmf, 1)

        value_distill = None
        distill_pieces = None
        if feasible:
            try:
                dis_reset, dis_pmf = truncate_renormalize(pre, MIN_DISTILL_THRESHOLD)
                dis_survival = survival * (1.0 - dis_reset) ** segments
                q_pmf = distill_pmf(dis_pmf, d_i)
                value_distill = (
                    secret_fraction(distilled_state)
                    * dis_survival
                    * _tail_mean(q_pmf, MIN_DISTILL_THRESHOLD)
                )
                distill_pieces = (dis_survival, q_pmf)
            except CertainResetError:
                feasible = False

        if forced_bits is not None:
            bit = forced_bits[i]
            if bit and not feasible:
                raise ScheduleError(f"cannot distill at level {i}: budget {budget}")
        elif rule.kind == "skr":
            bit = int(feasible and value_distill > value_keep)
        else:
            bit = int(feasible and state.fidelity < rule.f_th)

        decisions.append(
            LevelDecision(
                level=i,
                fidelity_in=state.fidelity,
                d_prob=d_i,
                feasible=feasible,
                value_keep=value_keep,
                value_distill=value_distill,
                chose_distill=bool(bit),
            )
        )
        d_bits.append(bit)
        d_probs.append(d_i)

        if bit:
            dis_survival, q_pmf = distill_pieces
            state = _maybe_dephase(distilled_state, params.distillation_hold_s(i), params)
            post_pmf, survival = q_pmf, dis_survival
            budget //= 2
        else:
            post_pmf, survival = keep_pmf, keep_survival
        states_out.append(state)

        if i < n:
            state = swap(state, state, noise)
            pre = swap_pmf(post_pmf)

    thresholds = (
        forced_thresholds if forced_thresholds is not None else default_thresholds(d_bits)
    )
    schedule = Schedule(tuple(d_bits), thresholds)

    budgets = [params.channels >> sum(d_bits[:i]) for i in range(n + 1)]
    for i, (m_i, r_i) in enumerate(zip(budgets, schedule.r_thresholds)):
        if m_i < r_i:
            raise ScheduleError(
                f"infeasible schedule: budget {m_i} below threshold {r_i} at level {i}"
            )

    recursion = run_recursion(
        n_segments, params.channels, pi0, schedule.d_bits, schedule.r_thresholds, d_probs
    )
    holds = tuple(
        (params.heralding_hold_s() if i == 0 else 0.0)
        + (params.distillation_hold_s(i) if d_bits[i] else 0.0)
        for i in range(n + 1)
    )
    return ScheduleBuild(
        schedule=schedule,
        pi0=pi0,
        states_in=tuple(states_in),
        states_out=tuple(states_out),
        d_probs=tuple(d_probs),
        decisions=tuple(decisions),
        recursion=recursion,
        holds_s=holds,
    )
