"""Synthetic score series with controlled suppression of mild positives.

The generator draws Normal(mean, sd) scores truncated to [-1, 1] by
redraw (clamping would pile atoms at the endpoints and distort
skewness), then deletes scores in the band (m, m + w] above the
truncated mean with a fixed probability, mimicking positive contents
that were never expressed.  The deleted-band bookkeeping uses the FULL
series' m: the counterfactual population defines what is missing.

Randomness comes from numpy's default generator (PCG64), fully
determined by the seed, so runs reproduce exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Sequence

import numpy as np

from .bias import truncated_mean
from .model import IndexPoint, ReputationSeries

SYNTH_START = date(2014, 1, 1)
SYNTH_TARGET = "synthetic"


class SynthError(ValueError):
    """Invalid synthetic-data specification."""


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic run."""

    n: int
    mean: float
    sd: float
    seed: int
    suppress_fraction: float
    suppress_band_pct: float

    def __post_init__(self) -> None:
        if self.n < 10:
            raise SynthError(f"n must be >= 10, got {self.n}")
        if not self.sd > 0:
            raise SynthError(f"sd must be positive, got {self.sd}")
        if not 0.0 <= self.suppress_fraction <= 1.0:
            raise SynthError(
                f"suppress_fraction must be in [0, 1], got {self.suppress_fraction}"
            )
        if not self.suppress_band_pct > 0:
            raise SynthError(
                f"suppress_band_pct must be positive, got {self.suppress_band_pct}"
            )


@dataclass(frozen=True)
class GroundTruth:
    """Exact deletion bookkeeping for one generated instance."""

    spec: SynthSpec
    m_full: float
    range_full: float
    w_abs: float
    band_lo_exclusive: float
    band_hi_inclusive: float
    deleted_count: int
    deleted_indices: tuple[int, ...]


@dataclass(frozen=True)
class SynthResult:
    full: ReputationSeries
    suppressed: ReputationSeries
    ground_truth: GroundTruth


def generate(spec: SynthSpec) -> SynthResult:
    """Generate the full and suppressed series for one spec, plus the
    exact record of what was deleted.  Deterministic given the seed."""
    rng = np.random.default_rng(spec.seed)
    scores = rng.normal(spec.mean, spec.sd, size=spec.n)
    out_of_range = (scores < -1.0) | (scores > 1.0)
    while np.any(out_of_range):
        scores[out_of_range] = rng.normal(
            spec.mean, spec.sd, size=int(out_of_range.sum())
        )
        out_of_range = (scores < -1.0) | (scores > 1.0)
    scores = scores.tolist()

    m_full = truncated_mean(scores)
    range_full = max(scores) - min(scores)
    w_abs = (spec.suppress_band_pct / 100.0) * range_full

    deleted: list[int] = []
    kept: list[int] = []
    for i, s in enumerate(scores):
        if m_full < s <= m_full + w_abs and rng.random() < spec.suppress_fraction:
            deleted.append(i)
        else:
            kept.append(i)

    full = _series(scores, range(spec.n))
    suppressed = _series(scores, kept)
    ground_truth = GroundTruth(
        spec=spec,
        m_full=m_full,
        range_full=range_full,
        w_abs=w_abs,
        band_lo_exclusive=m_full,
        band_hi_inclusive=m_full + w_abs,
        deleted_count=len(deleted),
        deleted_indices=tuple(deleted),
    )
    return SynthResult(full=full, suppressed=suppressed, ground_truth=ground_truth)


def expected_m(
    ground_truth: GroundTruth,
    suppressed: ReputationSeries,
    slope_epsilon: float = 0.0,
) -> float:
    """Reference M for the suppressed series at the suppression band's w.

    Recounts alpha and beta by brute force, on a code path deliberately
    independent of the analyzer (np.polyfit slope, fsum-based trimmed
    mean, plain loops for the counts).
    """
    scores = suppressed.scores()
    if len(scores) < 3:
        raise SynthError("suppressed series too short to recount")

    cumulative = np.cumsum(scores)
    slope = np.polyfit(np.arange(len(cumulative)), cumulative, 1)[0]
    if slope < -slope_epsilon:
        scores = [-s for s in scores]
    elif not slope > slope_epsilon:
        raise SynthError("zero trend: expected M undefined")

    working = list(scores)
    working.remove(max(working))
    working.remove(min(working))
    m = math.fsum(working) / len(working)

    w_abs = (ground_truth.spec.suppress_band_pct / 100.0) * (
        max(scores) - min(scores)
    )

    n_band_pos = n_band_neg = n_pos = n_neg = 0
    for s in scores:
        if m < s <= m + w_abs:
            n_band_pos += 1
        if m - w_abs <= s < m:
            n_band_neg += 1
        if s > 0:
            n_pos += 1
        if s < 0:
            n_neg += 1

    if n_band_pos == 0:
        raise SynthError("alpha undefined in recount: empty band above m")
    if n_pos == 0:
        raise SynthError("beta undefined in recount: no positive scores")
    alpha = n_band_neg / n_band_pos
    beta = n_neg / n_pos
    return 100.0 * (alpha - beta) / beta


def _series(scores: Sequence[float], indices) -> ReputationSeries:
    points = tuple(
        IndexPoint(period=SYNTH_START + timedelta(days=i), score=scores[i], count=1)
        for i in indices
    )
    return ReputationSeries(target=SYNTH_TARGET, points=points)
