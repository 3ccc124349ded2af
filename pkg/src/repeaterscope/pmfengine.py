"""Exact pair-count distributions for nested multiplexed repeater chains.

A burst starts with a binomial number of elementary pairs per segment.
Each nesting level optionally distills (pairing up survivors, each couple
succeeding independently), then merges sibling segments by an entanglement
swap, which keeps the minimum of the two counts.  A segment lineage aborts
whenever its count falls below the level threshold; the recursion tracks
the count distribution conditioned on no abort, together with the
conditional and unconditional abort probabilities per level.

PMFs are dense float vectors indexed by pair count, 0..budget.  Binomial
weights come from scipy, which evaluates them in log space, so channel
budgets up to 1024 are exact to double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

PMF_ATOL = 1e-9


class CertainResetError(ValueError):
    """Raised when truncation would remove all probability mass."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate_pmf(p: np.ndarray, atol: float = PMF_ATOL) -> None:
    if np.any(p < -atol):
        raise ValueError("PMF has negative entries")
    if abs(float(p.sum()) - 1.0) > atol:
        raise ValueError(f"PMF sums to {float(p.sum())!r}, expected 1")


def pmf_mean(p: np.ndarray) -> float:
    return float(np.arange(len(p)) @ p)


def elementary_pmf(m_channels: int, pi0: float) -> np.ndarray:
    """Binomial(m, pi0) distribution of raw link successes on one segment."""
    if m_channels < 1:
        raise ValueError("need at least one multiplexed channel")
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError("pi0 must lie in [0, 1]")
    return stats.binom.pmf(np.arange(m_channels + 1), m_channels, pi0)


def link_success_prob(l0_km: float, eta_c: float, l_att_km: float = 20.0) -> float:
    """Meet-in-the-middle elementary link success probability.

    Two photons each travel l0/2 and must both survive and couple, and the
    midpoint Bell-state analyser succeeds with probability 1/2:
    pi0 = (1/2) eta_c^2 exp(-l0 / l_att).
    """
    if l0_km <= 0 or l_att_km <= 0:
        raise ValueError("lengths must be positive")
    if not 0.0 < eta_c <= 1.0:
        raise ValueError("eta_c must lie in (0, 1]")
    return 0.5 * eta_c**2 * math.exp(-l0_km / l_att_km)


def distill_pmf(p: np.ndarray, d: float) -> np.ndarray:
    """Count distribution after one 2-to-1 distillation round.

    From j available pairs, floor(j/2) couples are attempted and each
    succeeds independently with probability d:

        q_k = sum_j p_j C(floor(j/2), k) d^k (1-d)^(floor(j/2)-k)

    The output vector has length floor(budget/2) + 1.
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError("distillation success probability must lie in [0, 1]")
    budget = len(p) - 1
    couples = np.arange(budget + 1) // 2
    ks = np.arange(budget // 2 + 1)
    # weights[k, j] = P(k successes | floor(j/2) couples)
    weights = stats.binom.pmf(ks[:, None], couples[None, :], d)
    return weights @ p


def swap_pmf(p: np.ndarray) -> np.ndarray:
    """Distribution of min(Y1, Y2) for two i.i.d. counts distributed as p."""
    at_least = np.cumsum(p[::-1])[::-1]  # at_least[k] = P(Y >= k)
    return p * (2.0 * at_least - p)


def truncate_renormalize(p: np.ndarray, r_threshold: int) -> tuple[float, np.ndarray]:
    """Condition on the count reaching ``r_threshold``.

    Returns (reset probability, conditional PMF).  A threshold of zero
    leaves the distribution untouched.
    """
    if r_threshold < 0:
        raise ValueError("threshold must be nonnegative")
    reset = float(p[:r_threshold].sum())
    survive = 1.0 - reset
    if survive <= 0.0:
        raise CertainResetError(f"all mass lies below threshold {r_threshold}")
    out = p.copy()
    out[:r_threshold] = 0.0
    out /= survive
    return reset, out


def level_budgets(m_channels: int, d_bits) -> list[int]:
    """Channel budget per level: M_i = floor(M / 2^(# distillations below i))."""
    budgets = []
    halvings = 0
    for bit in d_bits:
        budgets.append(m_channels >> halvings)
        halvings += int(bit)
    return budgets


@dataclass(frozen=True)
class ResetProfile:
    """Conditional (r) and unconditional (f) abort probabilities per level."""

    r: np.ndarray
    f: np.ndarray
    n_segments: int

    def survival_through(self, level: int) -> float:
        """P(no segment aborted at any level <= ``level``)."""
        segs = self.n_segments >> np.arange(level + 1)
        return float(np.prod((1.0 - self.r[: level + 1]) ** segs))


@dataclass(frozen=True)
class LevelDistributions:
    """Count distributions at one nesting level, conditioned on survival."""

    pre: np.ndarray          # arrival counts, before the threshold check
    reset: float             # conditional abort probability r_i
    conditional: np.ndarray  # after the threshold check (p')
    distilled: np.ndarray    # after the optional distillation round (q')
    budget: int


@dataclass(frozen=True)
class RecursionResult:
    n_segments: int
    m_channels: int
    pi0: float
    d_bits: tuple[int, ...]
    r_thresholds: tuple[int, ...]
    d_probs: tuple[float, ...]
    levels: tuple[LevelDistributions, ...]
    profile: ResetProfile

    @property
    def n_levels(self) -> int:
        return len(self.levels) - 1


def run_recursion(
    n_segments: int,
    m_channels: int,
    pi0: float,
    d_bits,
    r_thresholds,
    d_probs,
) -> RecursionResult:
    """Propagate the conditional count distribution through all levels.

    ``d_bits`` holds the per-level distillation decisions for levels
    0..n (the final level must not distill), ``r_thresholds`` the
    nonincreasing abort thresholds, and ``d_probs`` the per-level
    distillation success probabilities (ignored where the bit is 0).
    """
    if not is_power_of_two(n_segments):
        raise ValueError("segment count must be a power of two")
    n = n_segments.bit_length() - 1
    d_bits = tuple(int(b) for b in d_bits)
    r_thresholds = tuple(int(r) for r in r_thresholds)
    d_probs = tuple(float(d) for d in d_probs)
    if not len(d_bits) == len(r_thresholds) == len(d_probs) == n + 1:
        raise ValueError(f"need one decision, threshold and d per level 0..{n}")
    if any(b not in (0, 1) for b in d_bits):
        raise ValueError("decision bits must be 0 or 1")
    if d_bits[n] != 0:
        raise ValueError("no distillation is allowed at the final level")
    if any(r < 0 for r in r_thresholds):
        raise ValueError("thresholds must be nonnegative")
    if any(a < b for a, b in zip(r_thresholds, r_thresholds[1:])):
        raise ValueError("thresholds must be nonincreasing in level")
    budgets = level_budgets(m_channels, d_bits)
    if any(b < 1 for b in budgets):
        raise ValueError("schedule distills the channel budget below one pair")

    levels: list[LevelDistributions] = []
    resets: list[float] = []
    for i in range(n + 1):
        pre = (
            elementary_pmf(m_channels, pi0)
            if i == 0
            else swap_pmf(levels[i - 1].distilled)
        )
        reset, conditional = truncate_renormalize(pre, r_thresholds[i])
        distilled = distill_pmf(conditional, d_probs[i]) if d_bits[i] else conditional
        levels.append(LevelDistributions(pre, reset, conditional, distilled, budgets[i]))
        resets.append(reset)

    r = np.array(resets)
    segs = n_segments >> np.arange(n + 1)
    keep = (1.0 - r) ** segs
    f = (1.0 - keep) * np.concatenate(([1.0], np.cumprod(keep)[:-1]))
    profile = ResetProfile(r=r, f=f, n_segments=n_segments)
    return RecursionResult(
        n_segments=n_segments,
        m_channels=m_channels,
        pi0=pi0,
        d_bits=d_bits,
        r_thresholds=r_thresholds,
        d_probs=d_probs,
        levels=tuple(levels),
        profile=profile,
    )


def expected_pairs(result: RecursionResult, level: int) -> tuple[float, float]:
    """Expected surviving pair counts at a level, abort-weighted.

    Returns (before distillation, after distillation); both carry the
    survival prefactor prod_j (1 - r_j)^(N / 2^j) and sum counts from the
    level threshold upward.
    """
    lv = result.levels[level]
    pref = result.profile.survival_through(level)
    r_min = result.r_thresholds[level]

    def tail_mean(p: np.ndarray) -> float:
        ks = np.arange(len(p))
        sel = ks >= r_min
        return float(ks[sel] @ p[sel])

    return pref * tail_mean(lv.conditional), pref * tail_mean(lv.distilled)


def min_over_segments_expectation(m_channels: int, pi0: float, n_segments: int) -> float:
    """E[min of n i.i.d. Binomial(m, pi0) counts], computed exactly.

    For power-of-two segment counts the binomial is folded by repeated
    min-combination; otherwise the identity E[min] = sum_k P(min >= k)
    = sum_k P(Y >= k)^n is used directly.
    """
    if n_segments < 1:
        raise ValueError("need at least one segment")
    if is_power_of_two(n_segments):
        p = elementary_pmf(m_channels, pi0)
        for _ in range(n_segments.bit_length() - 1):
            p = swap_pmf(p)
        return pmf_mean(p)
    p = elementary_pmf(m_channels, pi0)
    at_least = np.cumsum(p[::-1])[::-1]
    return float(np.sum(at_least[1:] ** n_segments))


def twogn_c_success(m_channels: int, pi0: float, n_segments: int) -> float:
    """P(every segment sees at least one link success) = (1-(1-pi0)^m)^N."""
    if m_channels < 1 or n_segments < 1:
        raise ValueError("channel and segment counts must be positive")
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError("pi0 must lie in [0, 1]")
    return (1.0 - (1.0 - pi0) ** m_channels) ** n_segments
