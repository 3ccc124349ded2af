"""One-way repeater baseline built on quantum parity codes.

An (n, m) parity code ships one half of a logical Bell pair through a chain
of closely spaced stations.  Each station runs teleportation-based error
correction: loss detection, a fresh local logical Bell pair, transversal
CNOTs, logical X/Z readout of two blocks and a Pauli-frame update.  The
encoded qubit survives a hop iff every sub-block keeps at least one photon
and at least one sub-block arrives intact.

Operation errors are folded into a per-station logical flip probability
eps_L = coeff * n * m * (eps_g + xi); X and Z flips accumulate
independently along the chain.  The coefficient is a config knob, so
absolute one-way key rates are indicative rather than calibrated; the
erasure combinatorics and operation counts are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bellstate import BellDiagState, secret_fraction
from .costs import CostReport, normalize_per_secret_key
from .twoway import RunReport

MAX_CODE_BLOCKS = 70
MAX_BLOCK_SIZE = 20
MIN_SPACING_KM = 1.0
MAX_SPACING_KM = 4.0


@dataclass(frozen=True)
class QpcCode:
    """(n, m) parity code: n sub-blocks of m photons each."""

    n_blocks: int
    m_per_block: int

    def __post_init__(self) -> None:
        if not 1 <= self.n_blocks <= MAX_CODE_BLOCKS:
            raise ValueError(f"block count must lie in 1..{MAX_CODE_BLOCKS}")
        if not 1 <= self.m_per_block <= MAX_BLOCK_SIZE:
            raise ValueError(f"block size must lie in 1..{MAX_BLOCK_SIZE}")

    @property
    def physical_qubits(self) -> int:
        return self.n_blocks * self.m_per_block


@dataclass(frozen=True)
class OnewayParams:
    code: QpcCode
    spacing_km: float
    total_distance_km: float
    eta_c: float = 0.9
    eps_g: float = 1e-3
    xi: float | None = None
    l_att_km: float = 20.0
    logical_error_coeff: float = 1.0

    def __post_init__(self) -> None:
        if not MIN_SPACING_KM <= self.spacing_km <= MAX_SPACING_KM:
            raise ValueError(
                f"station spacing must lie in [{MIN_SPACING_KM}, {MAX_SPACING_KM}] km"
            )
        if self.total_distance_km <= 0:
            raise ValueError("total distance must be positive")
        if not 0.0 < self.eta_c <= 1.0:
            raise ValueError("eta_c must lie in (0, 1]")
        if not 0.0 <= self.eps_g < 1.0:
            raise ValueError("eps_g must lie in [0, 1)")
        if self.xi is None:
            object.__setattr__(self, "xi", 0.25 * self.eps_g)
        if not 0.0 <= self.xi < 1.0:
            raise ValueError("xi must lie in [0, 1)")
        if self.l_att_km <= 0:
            raise ValueError("attenuation length must be positive")
        if self.logical_error_coeff < 0:
            raise ValueError("logical error coefficient must be nonnegative")

    @property
    def n_stations(self) -> int:
        """Number of hops; each ends in a TEC station (the last one at Bob)."""
        return math.ceil(self.total_distance_km / self.spacing_km)


def qpc_success_prob(code: QpcCode, eta: float) -> float:
    """Erasure-recovery probability of one hop at per-photon survival eta.

    With a = eta^m (block intact) and b = 1 - (1-eta)^m (block nonempty):
    P = b^n - (b - a)^n.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    block_intact = eta**code.m_per_block
    if eta == 1.0:
        block_nonempty = 1.0
    else:
        # 1 - (1-eta)^m via expm1/log1p; the plain form underflows at tiny eta
        block_nonempty = -math.expm1(code.m_per_block * math.log1p(-eta))
    nonempty_incomplete = max(0.0, block_nonempty - block_intact)
    return block_nonempty**code.n_blocks - nonempty_incomplete**code.n_blocks


def photon_survival(spacing_km: float, eta_c: float, l_att_km: float = 20.0) -> float:
    """Per-photon, per-hop survival: coupling times fibre transmission."""
    if spacing_km < 0 or l_att_km <= 0:
        raise ValueError("lengths must be nonnegative / positive")
    if not 0.0 < eta_c <= 1.0:
        raise ValueError("eta_c must lie in (0, 1]")
    return eta_c * math.exp(-spacing_km / l_att_km)


def station_survival(params: OnewayParams) -> float:
    """End-to-end transmission success over all hops."""
    eta = photon_survival(params.spacing_km, params.eta_c, params.l_att_km)
    return qpc_success_prob(params.code, eta) ** params.n_stations


def logical_flip_prob(params: OnewayParams) -> float:
    """Per-station logical X (and Z) flip probability."""
    return (
        params.logical_error_coeff
        * params.code.physical_qubits
        * (params.eps_g + params.xi)
    )


def qpc_operation_counts(code: QpcCode, n_stations: int) -> CostReport:
    """Lower-bound operation counts: per station one transversal CNOT per
    photon, logical X plus Z block readouts, and three resident blocks
    (incoming plus two freshly prepared); ancillas are not counted."""
    if n_stations < 1:
        raise ValueError("need at least one station")
    per_station = code.physical_qubits
    return CostReport(
        repeaters=n_stations - 1,
        qubits_per_burst=3 * per_station * n_stations,
        two_qubit_gates=float(per_station * n_stations),
        measurements=float(2 * per_station * n_stations),
    )


def oneway_skr(params: OnewayParams) -> RunReport:
    """Secret-key rate and costs of the one-way chain."""
    stations = params.n_stations
    transmission = station_survival(params)
    eps_l = logical_flip_prob(params)
    saturated = eps_l >= 0.5
    if saturated:
        flip = 0.5
    else:
        flip = 0.5 * (1.0 - (1.0 - 2.0 * eps_l) ** stations)
    # Independent accumulated X and Z flips give a Bell-diagonal pair.
    state = BellDiagState(
        (
            (1 - flip) * (1 - flip),
            (1 - flip) * flip,
            flip * (1 - flip),
            flip * flip,
        )
    )
    fraction = 0.0 if saturated else secret_fraction(state)
    skr = transmission * fraction
    costs = normalize_per_secret_key(qpc_operation_counts(params.code, stations), skr)
    return RunReport(
        architecture="qpc",
        distance_km=params.total_distance_km,
        n_segments=stations,
        channels=1,
        eta_c=params.eta_c,
        eps_g=params.eps_g,
        xi=params.xi,
        t2_s=math.inf,
        rule="",
        f_th=None,
        schedule=None,
        skr_per_burst=skr,
        skr_per_channel_use=skr,
        fidelity=state.fidelity,
        secret_fraction=fraction,
        expected_pairs=transmission,
        final_state=state,
        reset_profile=None,
        costs=costs,
        timing=None,
    )
