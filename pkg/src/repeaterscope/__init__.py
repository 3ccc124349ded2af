"""Performance engine for long-distance multiplexed quantum repeater chains.

Analytic evaluation of a nested two-way protocol with probabilistic
distillation (exact pair-count distributions), a 2G-NC single-success
baseline and a parity-code one-way baseline, cross-validated by density
matrix and Monte Carlo oracles, with cost accounting and parameter sweeps.
"""

from .bellstate import (
    BellDiagState,
    NoiseParams,
    dejmps,
    dephase,
    from_depolarized_fidelity,
    secret_fraction,
    swap,
)
from .costs import CostReport, normalize_per_secret_key
from .oneway import OnewayParams, QpcCode, oneway_skr, qpc_success_prob
from .optimizer import EnvelopePoint, SweepGrid, dominance_report, envelope
from .params import ChainParams
from .pmfengine import (
    elementary_pmf,
    expected_pairs,
    link_success_prob,
    min_over_segments_expectation,
    run_recursion,
    twogn_c_success,
)
from .policy import DecisionRule, Schedule, build_schedule, schedule_halvings
from .twoway import RunReport, TimingModel, build_timing, evaluate_2gnc, evaluate_mtp

__version__ = "0.1.0"

__all__ = [
    "BellDiagState",
    "ChainParams",
    "CostReport",
    "DecisionRule",
    "EnvelopePoint",
    "NoiseParams",
    "OnewayParams",
    "QpcCode",
    "RunReport",
    "Schedule",
    "SweepGrid",
    "TimingModel",
    "build_schedule",
    "build_timing",
    "dejmps",
    "dephase",
    "dominance_report",
    "elementary_pmf",
    "envelope",
    "evaluate_2gnc",
    "evaluate_mtp",
    "expected_pairs",
    "from_depolarized_fidelity",
    "link_success_prob",
    "min_over_segments_expectation",
    "normalize_per_secret_key",
    "oneway_skr",
    "qpc_success_prob",
    "run_recursion",
    "schedule_halvings",
    "secret_fraction",
    "swap",
    "twogn_c_success",
]
