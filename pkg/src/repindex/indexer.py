"""Build reputation index series from opinions.

Opinions are bucketed into UTC calendar days and each non-empty bucket is
reduced to one score by the configured aggregator.  The only aggregator
currently supported is the weighted mean; the AggregatorSpec indirection
exists so alternatives can be added without touching callers.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

from .ingest import ScoreRow
from .model import IndexPoint, Opinion, ReputationSeries

SUPPORTED_AGGREGATORS = ("weighted_mean",)


class AggregationError(ValueError):
    """Invalid aggregation request (empty bucket, mixed targets/periods)."""


@dataclass(frozen=True)
class AggregatorSpec:
    """Names the reduction applied to one day's opinions."""

    kind: str = "weighted_mean"

    def __post_init__(self) -> None:
        if self.kind not in SUPPORTED_AGGREGATORS:
            raise AggregationError(f"unsupported aggregator: {self.kind!r}")


DEFAULT_AGGREGATOR = AggregatorSpec()


def aggregate_period(
    opinions: Sequence[Opinion], spec: AggregatorSpec = DEFAULT_AGGREGATOR
) -> IndexPoint:
    """Reduce one day's opinions for one target to a single score.

    score = sum(s_i * w_i) / sum(w_i); the result always lies between the
    smallest and largest input sentiment.
    """
    if not opinions:
        raise AggregationError("cannot aggregate an empty opinion list")
    targets = {o.target for o in opinions}
    if len(targets) > 1:
        raise AggregationError(f"mixed targets in one bucket: {sorted(targets)}")
    periods = {o.utc_day() for o in opinions}
    if len(periods) > 1:
        raise AggregationError(f"mixed periods in one bucket: {sorted(periods)}")

    total_weight = sum(o.weight for o in opinions)
    score = sum(o.sentiment * o.weight for o in opinions) / total_weight
    # Guard against float drift pushing a convex combination past a bound.
    score = min(max(score, min(o.sentiment for o in opinions)),
                max(o.sentiment for o in opinions))
    return IndexPoint(period=periods.pop(), score=score, count=len(opinions))


def build_series(
    opinions: Iterable[Opinion],
    target: str,
    spec: AggregatorSpec = DEFAULT_AGGREGATOR,
) -> ReputationSeries:
    """Daily reputation index for one target.

    Days with no opinions are omitted (the weighted mean is undefined for
    an empty collection).  The result is independent of input order.
    """
    buckets: dict[date, list[Opinion]] = defaultdict(list)
    for opinion in opinions:
        if opinion.target == target:
            buckets[opinion.utc_day()].append(opinion)
    points = []
    for day in sorted(buckets):
        # Sort within the bucket so the float summation order, and hence
        # the score, is permutation-invariant.
        bucket = sorted(buckets[day], key=lambda o: o.id)
        points.append(aggregate_period(bucket, spec))
    return ReputationSeries(target=target, points=tuple(points))


def average_entities(
    series_set: Sequence[ReputationSeries], label: str = "composite"
) -> ReputationSeries:
    """Per-day unweighted mean across entities.

    For each period present in at least one series, the composite score
    is the mean of the scores of the series that have that period, and
    the count is the number of contributing series.  Missing entities are
    excluded, not zero-filled.
    """
    if not series_set:
        raise AggregationError("average_entities requires at least one series")
    by_period: dict[date, list[float]] = defaultdict(list)
    for series in series_set:
        for point in series.points:
            by_period[point.period].append(point.score)
    points = tuple(
        IndexPoint(period=day, score=sum(vals) / len(vals), count=len(vals))
        for day, vals in sorted(by_period.items())
    )
    return ReputationSeries(target=label, points=points)


def series_from_rows(entity: str, rows: Sequence[ScoreRow]) -> ReputationSeries:
    """Adapt pre-aggregated score rows into a ReputationSeries.

    Pre-aggregated feeds carry no contributing-opinion counts; each row
    counts as one observation.
    """
    points = tuple(
        IndexPoint(period=r.date, score=r.score, count=1) for r in rows
    )
    return ReputationSeries(target=entity, points=points)
