"""Hardware and operation cost accounting, normalized per unit secret key.

Expected gate/measurement counts follow the analytic count distributions;
each swap and each distillation attempt is booked as one two-qubit gate
plus two single-qubit readouts.  Bursts that abort still pay for the
operations executed before the abort; levels after it contribute nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .params import ChainParams
from .pmfengine import RecursionResult, pmf_mean, twogn_c_success


@dataclass(frozen=True)
class CostReport:
    repeaters: int
    qubits_per_burst: int
    two_qubit_gates: float
    measurements: float
    # Normalized fields stay None until the secret-key rate is known; they
    # remain None (reported as absent) when the rate is zero.
    repeaters_per_key: float | None = None
    qubits_per_key: float | None = None
    gates_per_key: float | None = None
    measurements_per_key: float | None = None

    def __post_init__(self) -> None:
        if self.repeaters < 0 or self.qubits_per_burst < 0:
            raise ValueError("counts must be nonnegative")
        if self.two_qubit_gates < 0 or self.measurements < 0:
            raise ValueError("expected operation counts must be nonnegative")


def normalize_per_secret_key(report: CostReport, skr_per_burst: float) -> CostReport:
    """Divide the raw counters by the secret-key yield of one burst."""
    if skr_per_burst < 0:
        raise ValueError("secret-key rate must be nonnegative")
    if skr_per_burst == 0:
        return replace(
            report,
            repeaters_per_key=None,
            qubits_per_key=None,
            gates_per_key=None,
            measurements_per_key=None,
        )
    return replace(
        report,
        repeaters_per_key=report.repeaters / skr_per_burst,
        qubits_per_key=report.qubits_per_burst / skr_per_burst,
        gates_per_key=report.two_qubit_gates / skr_per_burst,
        measurements_per_key=report.measurements / skr_per_burst,
    )


def _expected_couples(pmf: np.ndarray) -> float:
    counts = np.arange(len(pmf)) // 2
    return float(counts @ pmf)


def mtp_costs(recursion: RecursionResult, params: ChainParams) -> CostReport:
    """Raw cost counters for one multiplexed two-way burst.

    Memories: 2M at each of the N-1 interior repeaters plus M at each end
    node.  Distillation attempts at a level pair up the surviving counts
    per segment; swaps at a merge node act on the minimum of the two
    sibling counts, which is exactly the next level's arrival mean.
    """
    n_segments = recursion.n_segments
    n = recursion.n_levels
    repeaters = n_segments - 1
    qubits = 2 * params.channels * (n_segments - 1) + 2 * params.channels

    gates = 0.0
    for i, level in enumerate(recursion.levels):
        alive = recursion.profile.survival_through(i)
        if recursion.d_bits[i]:
            segments = n_segments >> i
            gates += alive * segments * _expected_couples(level.conditional)
        if i < n:
            merge_nodes = n_segments >> (i + 1)
            gates += alive * merge_nodes * pmf_mean(recursion.levels[i + 1].pre)
    return CostReport(
        repeaters=repeaters,
        qubits_per_burst=qubits,
        two_qubit_gates=gates,
        measurements=2.0 * gates,
    )


def twognc_costs(params: ChainParams) -> CostReport:
    """Raw cost counters for one single-success multiplexed burst.

    Each interior repeater swaps its one retained pair only when both
    adjacent segments produced at least one link.
    """
    n_segments = params.n_segments
    pi0 = params.pi0()
    segment_ok = twogn_c_success(params.channels, pi0, 1)
    gates = (n_segments - 1) * segment_ok**2
    return CostReport(
        repeaters=n_segments - 1,
        qubits_per_burst=2 * params.channels * (n_segments - 1) + 2 * params.channels,
        two_qubit_gates=gates,
        measurements=2.0 * gates,
    )
