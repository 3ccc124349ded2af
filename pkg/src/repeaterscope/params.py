"""Physical and protocol parameters of a multiplexed two-way chain."""

from __future__ import annotations

from dataclasses import dataclass

from .bellstate import NoiseParams
from .pmfengine import is_power_of_two, link_success_prob

DEFAULT_L_ATT_KM = 20.0
DEFAULT_C_FIBER_KM_S = 200_000.0
DEFAULT_T2_S = 1.0
MAX_CHANNELS = 1024
MAX_SEGMENTS = 1024
# Elementary pairs are depolarized states with F = 1 - coeff * eps_g; both
# published coefficient conventions are allowed, nothing in between.
FIDELITY_COEFFS = (1.125, 1.25)


@dataclass(frozen=True)
class ChainParams:
    """Full parameter set for one two-way chain evaluation.

    ``xi`` defaults to a quarter of the gate error.  ``pi0_override`` and
    ``elementary_fidelity_override`` bypass the loss model and the
    depolarized-fidelity estimate; ``herald_hold_override_s`` and
    ``distill_hold_overrides_s`` replace the computed memory holds, and
    ``decoherence=False`` disables dephasing entirely.  Overrides exist so
    that alternative timing/noise conventions can be swapped in from config
    without touching the evaluators.
    """

    total_distance_km: float
    n_segments: int
    channels: int
    eta_c: float = 0.9
    eps_g: float = 1e-3
    xi: float | None = None
    t2_s: float = DEFAULT_T2_S
    l_att_km: float = DEFAULT_L_ATT_KM
    c_fiber_km_s: float = DEFAULT_C_FIBER_KM_S
    link_fidelity_coeff: float = 1.25
    source_rate_hz: float = 1e6
    pi0_override: float | None = None
    elementary_fidelity_override: float | None = None
    decoherence: bool = True
    herald_hold_override_s: float | None = None
    distill_hold_overrides_s: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.total_distance_km <= 0:
            raise ValueError("total distance must be positive")
        if not is_power_of_two(self.n_segments) or self.n_segments > MAX_SEGMENTS:
            raise ValueError(
                f"segment count must be a power of two <= {MAX_SEGMENTS}, "
                f"got {self.n_segments}"
            )
        if not 1 <= self.channels <= MAX_CHANNELS:
            raise ValueError(f"channel count must lie in 1..{MAX_CHANNELS}")
        if not 0.0 < self.eta_c <= 1.0:
            raise ValueError("eta_c must lie in (0, 1]")
        if not 0.0 <= self.eps_g < 1.0:
            raise ValueError("eps_g must lie in [0, 1)")
        if self.xi is None:
            object.__setattr__(self, "xi", 0.25 * self.eps_g)
        if not 0.0 <= self.xi < 1.0:
            raise ValueError("xi must lie in [0, 1)")
        if not self.t2_s > 0:
            raise ValueError("t2 must be positive")
        if self.l_att_km <= 0 or self.c_fiber_km_s <= 0:
            raise ValueError("attenuation length and fibre speed must be positive")
        if self.link_fidelity_coeff not in FIDELITY_COEFFS:
            raise ValueError(f"link fidelity coefficient must be one of {FIDELITY_COEFFS}")
        if self.source_rate_hz <= 0:
            raise ValueError("source rate must be positive")
        if self.pi0_override is not None and not 0.0 <= self.pi0_override <= 1.0:
            raise ValueError("pi0 override must lie in [0, 1]")
        if self.elementary_fidelity_override is not None and not (
            0.25 <= self.elementary_fidelity_override <= 1.0
        ):
            raise ValueError("elementary fidelity override must lie in [0.25, 1]")
        if self.herald_hold_override_s is not None and self.herald_hold_override_s < 0:
            raise ValueError("holds must be nonnegative")
        if self.distill_hold_overrides_s is not None:
            holds = tuple(float(h) for h in self.distill_hold_overrides_s)
            if len(holds) != self.n_levels + 1:
                raise ValueError(
                    f"hold overrides need one entry per level 0..{self.n_levels}"
                )
            if any(h < 0 for h in holds):
                raise ValueError("holds must be nonnegative")
            object.__setattr__(self, "distill_hold_overrides_s", holds)

    @property
    def n_levels(self) -> int:
        return self.n_segments.bit_length() - 1

    @property
    def l0_km(self) -> float:
        return self.total_distance_km / self.n_segments

    @property
    def elementary_fidelity(self) -> float:
        if self.elementary_fidelity_override is not None:
            return self.elementary_fidelity_override
        return 1.0 - self.link_fidelity_coeff * self.eps_g

    def pi0(self) -> float:
        if self.pi0_override is not None:
            return self.pi0_override
        return link_success_prob(self.l0_km, self.eta_c, self.l_att_km)

    def noise(self) -> NoiseParams:
        return NoiseParams(gate_error=self.eps_g, meas_error=self.xi, t2_s=self.t2_s)

    def heralding_hold_s(self) -> float:
        """Level-0 wait: photon out plus herald back over half a segment each."""
        if self.herald_hold_override_s is not None:
            return self.herald_hold_override_s
        return self.l0_km / self.c_fiber_km_s

    def distillation_hold_s(self, level: int) -> float:
        """Outcome-exchange wait across a level-``level`` span."""
        if self.distill_hold_overrides_s is not None:
            return self.distill_hold_overrides_s[level]
        return (2**level) * self.l0_km / self.c_fiber_km_s
