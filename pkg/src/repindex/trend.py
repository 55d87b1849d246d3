"""Cumulative reputation profiles and trend classification.

The trend of a series is judged from the ordinary-least-squares slope of
its cumulative sum against observation index (0..n-1), not against
calendar time: observed points can be irregularly spaced once empty days
are omitted.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from typing import Sequence

from .model import ReputationSeries

POSITIVE = "positive"
NEGATIVE = "negative"
ZERO = "zero"

TREND_LABELS = (POSITIVE, NEGATIVE, ZERO)


@dataclass(frozen=True)
class CumulativeProfile:
    """Prefix sums of a reputation series plus its trend label.

    ``trend`` is None until classified; ``warning`` is set when the
    series was too short (< 2 points) to classify.
    """

    target: str
    prefix: tuple[tuple[date, float], ...]
    total: float
    trend: str | None = None
    warning: bool = False


def cumulate(series: ReputationSeries) -> CumulativeProfile:
    """Prefix sums in period order; empty series gives total 0."""
    prefix: list[tuple[date, float]] = []
    running = 0.0
    for point in series.points:
        running += point.score
        prefix.append((point.period, running))
    return CumulativeProfile(
        target=series.target,
        prefix=tuple(prefix),
        total=prefix[-1][1] if prefix else 0.0,
    )


def ols_slope(values: Sequence[float]) -> float:
    """Least-squares slope of values against index 0..n-1 (closed form)."""
    n = len(values)
    if n < 2:
        raise ValueError("slope requires at least 2 points")
    mean_i = (n - 1) / 2.0
    mean_y = sum(values) / n
    num = sum((i - mean_i) * (y - mean_y) for i, y in enumerate(values))
    den = sum((i - mean_i) ** 2 for i in range(n))
    return num / den


def classify_trend(profile: CumulativeProfile, slope_epsilon: float = 0.0) -> str:
    """Label a cumulative profile positive / negative / zero trending.

    positive if slope > slope_epsilon, negative if slope < -slope_epsilon,
    otherwise zero.  Fewer than 2 points classifies as zero (the caller
    sees this via the profile warning flag from ``with_trend``).
    """
    if slope_epsilon < 0:
        raise ValueError("slope_epsilon must be non-negative")
    if len(profile.prefix) < 2:
        return ZERO
    slope = ols_slope([value for _, value in profile.prefix])
    if slope > slope_epsilon:
        return POSITIVE
    if slope < -slope_epsilon:
        return NEGATIVE
    return ZERO


def with_trend(
    profile: CumulativeProfile, slope_epsilon: float = 0.0
) -> CumulativeProfile:
    """Copy of the profile with trend set and the short-series warning."""
    return replace(
        profile,
        trend=classify_trend(profile, slope_epsilon),
        warning=len(profile.prefix) < 2,
    )
