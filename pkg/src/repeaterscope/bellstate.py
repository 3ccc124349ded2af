"""Bell-diagonal two-qubit state algebra.

States are diagonal in the Bell basis, ordered (Phi+, Phi-, Psi+, Psi-),
and fully described by their four populations.  All channels here map
Bell-diagonal states to Bell-diagonal states, so the whole repeater-chain
state evolution reduces to arithmetic on 4-vectors.  The matching
density-matrix circuit implementations live in ``dmoracle`` and are used
by the validation suite only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

COEFF_ATOL = 1e-12

# Slot index = phase_bit + 2 * parity_bit, so (Phi+, Phi-, Psi+, Psi-) =
# (0, 1, 2, 3) and composing two Pauli frames XORs the slot indices.


class DistillationUndefinedError(ValueError):
    """Raised when a distillation attempt has zero acceptance probability."""


@dataclass(frozen=True)
class BellDiagState:
    """Four Bell-basis populations (Phi+, Phi-, Psi+, Psi-)."""

    coeffs: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.coeffs) != 4:
            raise ValueError("a Bell-diagonal state has exactly four coefficients")
        cleaned = []
        for c in self.coeffs:
            if c < -COEFF_ATOL or c > 1 + COEFF_ATOL:
                raise ValueError(f"coefficient {c!r} outside [0, 1]")
            cleaned.append(min(max(c, 0.0), 1.0))
        total = math.fsum(cleaned)
        if abs(total - 1.0) > COEFF_ATOL:
            raise ValueError(f"coefficients sum to {total!r}, expected 1")
        object.__setattr__(self, "coeffs", tuple(cleaned))

    @property
    def fidelity(self) -> float:
        """Overlap with the target state Phi+."""
        return self.coeffs[0]


@dataclass(frozen=True)
class NoiseParams:
    """Two-qubit gate error, single-qubit measurement error, memory T2."""

    gate_error: float = 0.0
    meas_error: float = 0.0
    t2_s: float = math.inf

    def __post_init__(self) -> None:
        if not 0.0 <= self.gate_error <= 1.0:
            raise ValueError("gate_error must lie in [0, 1]")
        if not 0.0 <= self.meas_error <= 1.0:
            raise ValueError("meas_error must lie in [0, 1]")
        if not self.t2_s > 0.0:
            raise ValueError("t2 must be positive")

    @property
    def eps_eff(self) -> float:
        """Combined depolarizing weight of one two-qubit gate plus two readouts."""
        return 1.0 - (1.0 - self.gate_error) * (1.0 - self.meas_error) ** 2


PERFECT_OPS = NoiseParams()


def from_depolarized_fidelity(fidelity: float) -> BellDiagState:
    """Depolarized pair of the given fidelity: (F, (1-F)/3, (1-F)/3, (1-F)/3)."""
    if not 0.25 <= fidelity <= 1.0:
        raise ValueError(f"depolarized fidelity must lie in [0.25, 1], got {fidelity!r}")
    rest = (1.0 - fidelity) / 3.0
    return BellDiagState((fidelity, rest, rest, rest))


def dephase(state: BellDiagState, t_s: float, t2_s: float) -> BellDiagState:
    """Memory dephasing for a hold of ``t_s`` seconds.

    Pauli-Z dephasing mixes Phi+ with Phi- and Psi+ with Psi-, keeping the
    original population with weight lam = (1 + exp(-t/T2)) / 2.
    The map is a semigroup in t, so successive holds may be applied in any
    split.
    """
    if t_s < 0:
        raise ValueError("hold duration must be nonnegative")
    if not t2_s > 0:
        raise ValueError("t2 must be positive")
    lam = 0.5 * (1.0 + math.exp(-t_s / t2_s))
    p0, p1, p2, p3 = state.coeffs
    return BellDiagState(
        (
            lam * p0 + (1 - lam) * p1,
            lam * p1 + (1 - lam) * p0,
            lam * p2 + (1 - lam) * p3,
            lam * p3 + (1 - lam) * p2,
        )
    )


def _klein_convolve(a: tuple[float, ...], b: tuple[float, ...]) -> list[float]:
    # Deterministic entanglement swapping combines Bell indices by the
    # Klein four-group: output slot = XOR of input slots.
    out = [0.0, 0.0, 0.0, 0.0]
    for i in range(4):
        ai = a[i]
        if ai == 0.0:
            continue
        for j in range(4):
            out[i ^ j] += ai * b[j]
    return out


def swap(a: BellDiagState, b: BellDiagState, noise: NoiseParams = PERFECT_OPS) -> BellDiagState:
    """Entanglement swap of two pairs at a shared middle node.

    The noiseless output is the Klein four-group convolution of the input
    populations; gate and readout imperfections then admix the maximally
    mixed state with weight ``noise.eps_eff``.
    """
    core = _klein_convolve(a.coeffs, b.coeffs)
    eps = noise.eps_eff
    return BellDiagState(tuple((1 - eps) * c + eps * 0.25 for c in core))


def dejmps(
    a: BellDiagState, b: BellDiagState, noise: NoiseParams = PERFECT_OPS
) -> tuple[float, BellDiagState]:
    """One 2-to-1 distillation attempt; returns (success probability, output).

    Noiseless map, with inputs (a1..a4), (b1..b4) in Bell order:

        d    = (a1 + a4)(b1 + b4) + (a2 + a3)(b2 + b3)
        out ~ (a1 b1 + a4 b4,  a2 b2 + a3 b3,  a2 b3 + a3 b2,  a1 b4 + a4 b1)

    Gate and readout noise is folded into the pre-measurement joint state as
    a depolarizing admixture of weight ``eps_eff``: the scrambled branch
    accepts with probability 1/2 and leaves a maximally mixed pair, i.e.

        d    = (1 - eps) d0 + eps / 2
        out  = ((1 - eps) out0 + (eps / 2) * uniform) / d

    which agrees exactly with inserting ``(1-eps) rho + eps I/16`` before the
    coincidence measurement in the full circuit (see ``dmoracle``).
    """
    a1, a2, a3, a4 = a.coeffs
    b1, b2, b3, b4 = b.coeffs
    unnorm = (
        a1 * b1 + a4 * b4,
        a2 * b2 + a3 * b3,
        a2 * b3 + a3 * b2,
        a1 * b4 + a4 * b1,
    )
    d_clean = (a1 + a4) * (b1 + b4) + (a2 + a3) * (b2 + b3)
    eps = noise.eps_eff
    d = (1 - eps) * d_clean + 0.5 * eps
    if d <= 0.0:
        raise DistillationUndefinedError(
            "distillation acceptance probability is zero for these inputs"
        )
    out = tuple(((1 - eps) * u + 0.125 * eps) / d for u in unnorm)
    return d, BellDiagState(out)


def binary_entropy(p: float) -> float:
    """Shannon entropy of a bit with bias p, in bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability out of range")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def secret_fraction(state: BellDiagState) -> float:
    """Asymptotic one-way BB84 key fraction: max(0, 1 - h(e_x) - h(e_z)).

    e_z is the bit-flip rate (Psi populations), e_x the phase-flip rate
    (Phi- and Psi- populations).
    """
    p0, p1, p2, p3 = state.coeffs
    e_z = p2 + p3
    e_x = p1 + p3
    return max(0.0, 1.0 - binary_entropy(e_x) - binary_entropy(e_z))
