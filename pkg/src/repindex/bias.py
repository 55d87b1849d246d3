"""Missing-positive-sentiment measurement.

The analysis compares how scores distribute in a band around the
truncated mean m against the full series: alpha is the below/above count
ratio inside the band, beta the negative/positive ratio overall, and
M = 100 * (alpha - beta) / beta estimates the percentage of positive
contents that were never expressed.  A negative-trending series is
negated first and analysed as positive-trending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import IndexPoint, ReputationSeries
from . import trend as trend_mod

# Band semi-widths in percent of the score range: 2.5% .. 16.5% step 1.
# The 5% of the range nearest the mean is excluded as unstable.
DEFAULT_SWEEP = tuple(2.5 + k for k in range(15))


class BiasError(ValueError):
    """The series cannot support the bias analysis."""


class UndefinedRatioError(BiasError):
    """A count ratio has a zero denominator; names which one."""


@dataclass(frozen=True)
class BandCounts:
    """Score counts for one band around m and for the whole series.

    n_band_pos counts scores in (m, m+w], n_band_neg in [m-w, m);
    scores exactly equal to m fall in neither.  n_pos / n_neg count
    strictly positive / negative scores (zeros in neither).
    """

    n_band_pos: int
    n_band_neg: int
    n_pos: int
    n_neg: int


@dataclass(frozen=True)
class BandResult:
    """Per-semi-width outcome of the sweep; alpha/m are None when the
    band's positive side is empty."""

    w_pct: float
    w_abs: float
    counts: BandCounts
    alpha: float | None
    m: float | None


@dataclass(frozen=True)
class BiasReport:
    """Full analysis of one entity's series."""

    entity: str
    trend: str
    skew_window: float | None
    skew_all: float | None
    alpha: float | None
    beta: float | None
    m_statistic: float | None
    per_w: tuple[BandResult, ...]
    sign_flipped: bool
    warning: str | None = None


@dataclass(frozen=True)
class InflationResult:
    """Inflated series plus the number of scores clamped back to [-1, 1]."""

    series: ReputationSeries
    clamped: int


def truncated_mean(scores: Sequence[float]) -> float:
    """Mean after removing exactly one maximal and one minimal score.

    On ties, one instance of each extreme is removed.
    """
    if len(scores) < 3:
        raise BiasError(f"truncated mean needs >= 3 scores, got {len(scores)}")
    trimmed = sorted(scores)[1:-1]
    return sum(trimmed) / len(trimmed)


def skewness(scores: Sequence[float]) -> float:
    """Fisher-Pearson moment coefficient g1 = m3 / m2^(3/2).

    Population moments m_k = (1/n) sum (x - mean)^k.
    """
    if len(scores) < 3:
        raise BiasError(f"skewness needs >= 3 scores, got {len(scores)}")
    x = np.asarray(scores, dtype=float)
    centered = x - x.mean()
    m2 = np.mean(centered**2)
    if m2 == 0.0:
        raise BiasError("skewness undefined for zero-variance data")
    m3 = np.mean(centered**3)
    return float(m3 / m2**1.5)


def band_counts(scores: Sequence[float], m: float, w_abs: float) -> BandCounts:
    """Count scores in the half-open bands around m and by sign overall."""
    if not w_abs > 0:
        raise BiasError(f"band semi-width must be positive, got {w_abs}")
    x = np.asarray(scores, dtype=float)
    return BandCounts(
        n_band_pos=int(np.count_nonzero((x > m) & (x <= m + w_abs))),
        n_band_neg=int(np.count_nonzero((x >= m - w_abs) & (x < m))),
        n_pos=int(np.count_nonzero(x > 0)),
        n_neg=int(np.count_nonzero(x < 0)),
    )


def ratios(counts: BandCounts) -> tuple[float, float]:
    """alpha = N_w- / N_w+ and beta = N- / N+."""
    if counts.n_band_pos == 0:
        raise UndefinedRatioError("alpha undefined: no scores in (m, m+w]")
    if counts.n_pos == 0:
        raise UndefinedRatioError("beta undefined: no positive scores")
    return counts.n_band_neg / counts.n_band_pos, counts.n_neg / counts.n_pos


def missing_pct(alpha: float, beta: float) -> float:
    """M = 100 * (alpha - beta) / beta."""
    if not beta > 0:
        raise BiasError(f"beta must be positive, got {beta}")
    return 100.0 * (alpha - beta) / beta


def analyze(
    series: ReputationSeries,
    sweep: Sequence[float] = DEFAULT_SWEEP,
    slope_epsilon: float = 0.0,
) -> BiasReport:
    """Run the full bias analysis for one entity.

    Classifies the cumulative trend, sign-flips a negative-trending
    series, sweeps the band semi-widths, and reports per-band and
    headline alpha / M alongside window and whole-series skewness.
    The headline alpha is the mean of the defined per-band alphas and the
    headline M applies the missing-percentage formula to it once.
    """
    if len(series) < 3:
        raise BiasError(f"analysis needs >= 3 points, got {len(series)}")
    if not sweep:
        raise BiasError("sweep must be non-empty")
    if any(w <= 0 for w in sweep):
        raise BiasError("sweep semi-widths must all be positive")

    label = trend_mod.classify_trend(trend_mod.cumulate(series), slope_epsilon)
    scores = series.scores()
    sign_flipped = False
    if label == trend_mod.NEGATIVE:
        scores = [-s for s in scores]
        sign_flipped = True

    skew_all = _maybe_skew(scores)

    if label == trend_mod.ZERO:
        return BiasReport(
            entity=series.target,
            trend=label,
            skew_window=None,
            skew_all=skew_all,
            alpha=None,
            beta=None,
            m_statistic=None,
            per_w=(),
            sign_flipped=False,
            warning="zero trend: missing-sentiment measurement not applicable",
        )

    m = truncated_mean(scores)
    score_range = max(scores) - min(scores)
    if score_range == 0:
        raise BiasError("zero score range: bands are degenerate")

    full = band_counts(scores, m, (max(sweep) / 100.0) * score_range)
    if full.n_pos == 0:
        raise UndefinedRatioError("beta undefined: no positive scores")
    beta = full.n_neg / full.n_pos

    per_w: list[BandResult] = []
    defined_alphas: list[float] = []
    for w_pct in sweep:
        w_abs = (w_pct / 100.0) * score_range
        counts = band_counts(scores, m, w_abs)
        if counts.n_band_pos == 0:
            per_w.append(BandResult(w_pct, w_abs, counts, None, None))
            continue
        alpha_w = counts.n_band_neg / counts.n_band_pos
        per_w.append(
            BandResult(w_pct, w_abs, counts, alpha_w, missing_pct(alpha_w, beta))
        )
        defined_alphas.append(alpha_w)

    if not defined_alphas:
        raise BiasError("all per-band alphas undefined: every band is empty above m")

    w_max_abs = (max(sweep) / 100.0) * score_range
    window = [s for s in scores if m - w_max_abs <= s <= m + w_max_abs]
    skew_window = _maybe_skew(window)

    headline_alpha = sum(defined_alphas) / len(defined_alphas)
    return BiasReport(
        entity=series.target,
        trend=label,
        skew_window=skew_window,
        skew_all=skew_all,
        alpha=headline_alpha,
        beta=beta,
        m_statistic=missing_pct(headline_alpha, beta),
        per_w=tuple(per_w),
        sign_flipped=sign_flipped,
    )


def inflate(series: ReputationSeries, m_statistic: float) -> InflationResult:
    """Scale every score by (1 + M/100), clamping back into [-1, 1].

    Intended for positive-trending series; the caller checks the trend.
    """
    if m_statistic < 0:
        raise BiasError(f"inflation percentage must be >= 0, got {m_statistic}")
    factor = 1.0 + m_statistic / 100.0
    clamped = 0
    points = []
    for point in series.points:
        score = point.score * factor
        if score > 1.0 or score < -1.0:
            score = max(-1.0, min(1.0, score))
            clamped += 1
        points.append(IndexPoint(period=point.period, score=score, count=point.count))
    return InflationResult(
        series=ReputationSeries(target=series.target, points=tuple(points)),
        clamped=clamped,
    )


def _maybe_skew(scores: Sequence[float]) -> float | None:
    try:
        return skewness(scores)
    except BiasError:
        return None
