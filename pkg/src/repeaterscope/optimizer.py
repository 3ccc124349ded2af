"""Exhaustive parameter sweeps and per-distance best-configuration envelopes.

Grids are desk-scale, so every configuration is evaluated and the argmax
(or argmin, for resource objectives) is taken directly.  Evaluations are
independent and may be spread over worker processes; results are sorted
into canonical order before selection so parallelism cannot change the
envelope.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .oneway import OnewayParams, QpcCode, oneway_skr
from .params import ChainParams
from .pmfengine import CertainResetError, is_power_of_two
from .policy import DecisionRule, ScheduleError
from .twoway import RunReport, evaluate_2gnc, evaluate_mtp

OBJECTIVES = ("max_skr_per_channel_use", "min_qubits_per_unit_key")
ARCHITECTURES = ("mtp", "2gnc", "qpc")


@dataclass(frozen=True)
class SweepGrid:
    """Configuration space searched per distance."""

    distances_km: tuple[float, ...]
    n_segment_options: tuple[int, ...] = (2, 4, 8, 16, 32, 64)
    channel_options: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64, 128, 256)
    qpc_n_options: tuple[int, ...] = tuple(range(1, 71))
    qpc_m_options: tuple[int, ...] = tuple(range(1, 21))
    spacing_options_km: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0)

    def __post_init__(self) -> None:
        if not self.distances_km:
            raise ValueError("grid needs at least one distance")
        if any(not is_power_of_two(n) or n > 1024 for n in self.n_segment_options):
            raise ValueError("segment options must be powers of two <= 1024")
        if any(not 1 <= m <= 1024 for m in self.channel_options):
            raise ValueError("channel options must lie in 1..1024")
        if any(not 1 <= n <= 70 for n in self.qpc_n_options):
            raise ValueError("code block counts must lie in 1..70")
        if any(not 1 <= m <= 20 for m in self.qpc_m_options):
            raise ValueError("code block sizes must lie in 1..20")
        if any(not 1.0 <= s <= 4.0 for s in self.spacing_options_km):
            raise ValueError("station spacings must lie in [1, 4] km")


@dataclass(frozen=True)
class EnvelopePoint:
    distance_km: float
    architecture: str
    objective: str
    config: dict
    metric: float | None
    report: RunReport | None
    reason: str | None = None  # set when no feasible configuration exists


def _evaluate_config(args):
    arch, base, rule, distance, config = args
    try:
        if arch == "mtp":
            params = replace(
                base,
                total_distance_km=distance,
                n_segments=config["n_segments"],
                channels=config["channels"],
            )
            return config, evaluate_mtp(params, rule)
        if arch == "2gnc":
            params = replace(
                base,
                total_distance_km=distance,
                n_segments=config["n_segments"],
                channels=config["channels"],
            )
            return config, evaluate_2gnc(params)
        params = OnewayParams(
            code=QpcCode(config["qpc_n"], config["qpc_m"]),
            spacing_km=config["spacing_km"],
            total_distance_km=distance,
            eta_c=base.eta_c,
            eps_g=base.eps_g,
            xi=base.xi,
            l_att_km=base.l_att_km,
        )
        return config, oneway_skr(params)
    except (CertainResetError, ScheduleError, ValueError) as exc:
        return config, str(exc)


def _configs_for(arch: str, grid: SweepGrid):
    if arch in ("mtp", "2gnc"):
        return [
            {"n_segments": n, "channels": m}
            for n in grid.n_segment_options
            for m in grid.channel_options
        ]
    return [
        {"qpc_n": n, "qpc_m": m, "spacing_km": s}
        for n in grid.qpc_n_options
        for m in grid.qpc_m_options
        for s in grid.spacing_options_km
    ]


def _metric(report: RunReport, objective: str) -> float | None:
    if objective == "max_skr_per_channel_use":
        return report.skr_per_channel_use
    return report.costs.qubits_per_key  # None when the key rate is zero


def _resource_key(arch: str, config: dict) -> tuple:
    if arch in ("mtp", "2gnc"):
        return (config["channels"], config["n_segments"])
    return (
        config["qpc_n"] * config["qpc_m"],
        config["qpc_n"],
        config["qpc_m"],
        config["spacing_km"],
    )


def envelope(
    arch: str,
    grid: SweepGrid,
    base: ChainParams,
    objective: str = "max_skr_per_channel_use",
    rule: DecisionRule = DecisionRule.skr(),
    workers: int = 1,
) -> list[EnvelopePoint]:
    """Best configuration (and its report) per distance.

    Ties are broken toward the smaller resource footprint: fewer channels,
    then fewer segments, or the smaller parity code.
    """
    if arch not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {arch!r}")
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    configs = _configs_for(arch, grid)
    points: list[EnvelopePoint] = []
    for distance in grid.distances_km:
        jobs = [(arch, base, rule, distance, cfg) for cfg in configs]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_evaluate_config, jobs, chunksize=16))
        else:
            results = [_evaluate_config(j) for j in jobs]
        results.sort(key=lambda cr: _resource_key(arch, cr[0]))

        best = None  # (metric, resource_key, config, report)
        maximize = objective == "max_skr_per_channel_use"
        for config, outcome in results:
            if isinstance(outcome, str):
                continue
            metric = _metric(outcome, objective)
            if metric is None:
                continue
            key = _resource_key(arch, config)
            if (
                best is None
                or (maximize and metric > best[0])
                or (not maximize and metric < best[0])
                or (metric == best[0] and key < best[1])
            ):
                best = (metric, key, config, outcome)
        if best is None:
            points.append(
                EnvelopePoint(
                    distance_km=distance,
                    architecture=arch,
                    objective=objective,
                    config={},
                    metric=None,
                    report=None,
                    reason="no feasible configuration on the grid",
                )
            )
        else:
            points.append(
                EnvelopePoint(
                    distance_km=distance,
                    architecture=arch,
                    objective=objective,
                    config=best[2],
                    metric=best[0],
                    report=best[3],
                )
            )
    return points


@dataclass(frozen=True)
class DominanceComparison:
    distance_km: float
    metric_a: float | None
    metric_b: float | None
    ratio: float | None
    a_wins: bool | None
    config_a: dict = field(default_factory=dict)
    config_b: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DominanceReport:
    comparisons: tuple[DominanceComparison, ...]

    @property
    def violations(self) -> tuple[DominanceComparison, ...]:
        return tuple(c for c in self.comparisons if c.a_wins is False)

    @property
    def strict_wins(self) -> int:
        return sum(
            1
            for c in self.comparisons
            if c.a_wins and c.metric_b is not None and c.metric_a > c.metric_b
        )


def dominance_report(a: list[EnvelopePoint], b: list[EnvelopePoint]) -> DominanceReport:
    """Per-distance comparison of two envelopes (a vs b, higher is better)."""
    if [p.distance_km for p in a] != [p.distance_km for p in b]:
        raise ValueError("envelopes cover different distance grids")
    comparisons = []
    for pa, pb in zip(a, b):
        if pa.metric is None or pb.metric is None:
            comparisons.append(
                DominanceComparison(pa.distance_km, pa.metric, pb.metric, None, None)
            )
            continue
        ratio = pa.metric / pb.metric if pb.metric > 0 else None
        comparisons.append(
            DominanceComparison(
                distance_km=pa.distance_km,
                metric_a=pa.metric,
                metric_b=pb.metric,
                ratio=ratio,
                a_wins=pa.metric >= pb.metric,
                config_a=pa.config,
                config_b=pb.config,
            )
        )
    return DominanceReport(tuple(comparisons))
