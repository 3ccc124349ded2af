"""Monte Carlo burst simulator used to validate the analytic recursion.

This module samples the stochastic process directly - binomial link
generation, per-couple distillation coin flips, min-taking swaps and the
threshold aborts - and deliberately shares no distribution code with
``pmfengine``.  Aborted bursts deliver zero pairs but keep the operation
counts they accumulated before the abort.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CHUNK = 100_000


@dataclass(frozen=True)
class TrialOutcome:
    delivered_pairs: int
    aborted_at_level: int | None
    gates_used: int
    measurements_used: int

    def __post_init__(self) -> None:
        if self.aborted_at_level is not None and self.delivered_pairs != 0:
            raise ValueError("aborted bursts deliver no pairs")


@dataclass(frozen=True)
class McEstimate:
    """Aggregated burst statistics with per-bin standard errors."""

    trials: int
    delivered_pmf: np.ndarray
    delivered_se: np.ndarray
    abort_freq: np.ndarray
    abort_se: np.ndarray
    mean_delivered: float
    mean_gates: float
    mean_measurements: float
    level_conditional_pmfs: tuple[np.ndarray, ...] | None = None


def _validate(n_segments: int, m_channels: int, pi0: float, d_bits, r_thresholds, d_probs):
    if n_segments < 1 or n_segments & (n_segments - 1):
        raise ValueError("segment count must be a power of two")
    n = n_segments.bit_length() - 1
    d_bits = tuple(int(b) for b in d_bits)
    r_thresholds = tuple(int(r) for r in r_thresholds)
    d_probs = tuple(float(d) for d in d_probs)
    if not len(d_bits) == len(r_thresholds) == len(d_probs) == n + 1:
        raise ValueError(f"need one decision, threshold and d per level 0..{n}")
    if d_bits[n] != 0:
        raise ValueError("no distillation is allowed at the final level")
    if not 0.0 <= pi0 <= 1.0:
        raise ValueError("pi0 must lie in [0, 1]")
    if m_channels < 1:
        raise ValueError("need at least one channel")
    return n, d_bits, r_thresholds, d_probs


def _run_chunk(
    rng: np.random.Generator,
    trials: int,
    n: int,
    n_segments: int,
    m_channels: int,
    pi0: float,
    d_bits,
    r_thresholds,
    d_probs,
    level_hists=None,
):
    counts = rng.binomial(m_channels, pi0, size=(trials, n_segments))
    alive = np.ones(trials, dtype=bool)
    abort_level = np.full(trials, -1, dtype=np.int64)
    gates = np.zeros(trials, dtype=np.int64)

    for i in range(n + 1):
        fails = alive & (counts.min(axis=1) < r_thresholds[i])
        abort_level[fails] = i
        alive &= ~fails
        if level_hists is not None:
            flat = counts[alive].ravel()
            level_hists[i] += np.bincount(flat, minlength=m_channels + 1)[: m_channels + 1]
        if d_bits[i]:
            couples = counts >> 1
            successes = rng.binomial(couples, d_probs[i])
            gates += np.where(alive, couples.sum(axis=1), 0)
            counts = successes
        if i < n:
            merged = np.minimum(counts[:, 0::2], counts[:, 1::2])
            gates += np.where(alive, merged.sum(axis=1), 0)
            counts = merged

    delivered = np.where(alive, counts[:, 0], 0)
    return delivered, abort_level, gates


def simulate_burst(
    n_segments: int,
    m_channels: int,
    pi0: float,
    d_bits,
    r_thresholds,
    d_probs,
    seed: int,
) -> TrialOutcome:
    """Run a single burst; identical seeds give identical outcomes."""
    n, d_bits, r_thresholds, d_probs = _validate(
        n_segments, m_channels, pi0, d_bits, r_thresholds, d_probs
    )
    rng = np.random.default_rng(seed)
    delivered, abort_level, gates = _run_chunk(
        rng, 1, n, n_segments, m_channels, pi0, d_bits, r_thresholds, d_probs
    )
    aborted = None if abort_level[0] < 0 else int(abort_level[0])
    return TrialOutcome(
        delivered_pairs=int(delivered[0]),
        aborted_at_level=aborted,
        gates_used=int(gates[0]),
        measurements_used=2 * int(gates[0]),
    )


def estimate_pmf(
    n_segments: int,
    m_channels: int,
    pi0: float,
    d_bits,
    r_thresholds,
    d_probs,
    trials: int,
    seed: int,
    record_levels: bool = False,
) -> McEstimate:
    """Aggregate many bursts into an empirical delivered-count distribution.

    The delivered PMF is unconditional: aborted bursts count as zero pairs.
    With ``record_levels`` the per-level segment-count histograms
    (conditioned on the burst being alive at that level's check) are kept
    as well, for comparison against the conditional distributions of the
    recursion.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    n, d_bits, r_thresholds, d_probs = _validate(
        n_segments, m_channels, pi0, d_bits, r_thresholds, d_probs
    )
    rng = np.random.default_rng(seed)
    delivered_hist = np.zeros(m_channels + 1, dtype=np.int64)
    abort_hist = np.zeros(n + 1, dtype=np.int64)
    level_hists = (
        [np.zeros(m_channels + 1, dtype=np.int64) for _ in range(n + 1)]
        if record_levels
        else None
    )
    total_delivered = 0
    total_gates = 0
    done = 0
    while done < trials:
        chunk = min(_CHUNK, trials - done)
        delivered, abort_level, gates = _run_chunk(
            rng, chunk, n, n_segments, m_channels, pi0,
            d_bits, r_thresholds, d_probs, level_hists,
        )
        delivered_hist += np.bincount(delivered, minlength=m_channels + 1)
        aborted = abort_level[abort_level >= 0]
        abort_hist += np.bincount(aborted, minlength=n + 1)
        total_delivered += int(delivered.sum())
        total_gates += int(gates.sum())
        done += chunk

    pmf = delivered_hist / trials
    se = np.sqrt(pmf * (1.0 - pmf) / trials)
    abort_freq = abort_hist / trials
    abort_se = np.sqrt(abort_freq * (1.0 - abort_freq) / trials)
    level_pmfs = None
    if record_levels:
        level_pmfs = tuple(
            h / h.sum() if h.sum() else h.astype(float) for h in level_hists
        )
    return McEstimate(
        trials=trials,
        delivered_pmf=pmf,
        delivered_se=se,
        abort_freq=abort_freq,
        abort_se=abort_se,
        mean_delivered=total_delivered / trials,
        mean_gates=total_gates / trials,
        mean_measurements=2.0 * total_gates / trials,
        level_conditional_pmfs=level_pmfs,
    )
