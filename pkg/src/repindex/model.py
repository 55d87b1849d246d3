"""Core domain types: opinions, index points, and reputation series.

All types are immutable after construction and validate their own
invariants, so they can be shared freely across threads.  Sentiment is a
plain float constrained to [-1, 1]; the constraint is enforced by
``check_sentiment`` and by every constructor that stores one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Any, Mapping

SENTIMENT_MIN = -1.0
SENTIMENT_MAX = 1.0


class ModelError(ValueError):
    """Invariant violation in a core domain type."""


class RejectedOpinion(ModelError):
    """A raw opinion record failed validation.

    ``reasons`` lists every field-level problem found, not just the first.
    """

    def __init__(self, reasons: list[str]):
        super().__init__("; ".join(reasons))
        self.reasons = list(reasons)


def check_sentiment(value: float) -> float:
    """Validate a sentiment value, rejecting NaN, infinities and
    anything outside [-1, 1]."""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ModelError(f"sentiment must be a real number, got {value!r}")
    if math.isnan(value) or math.isinf(value):
        raise ModelError("sentiment must be finite")
    if not SENTIMENT_MIN <= value <= SENTIMENT_MAX:
        raise ModelError(f"sentiment out of range [-1, 1]: {value}")
    return value


@dataclass(frozen=True)
class Opinion:
    """One mined content: sentiment plus identity, time, target and holder.

    ``weight`` defaults to 1.0 and must be strictly positive.
    ``categories`` is an ordered, possibly empty, tuple of tags.
    """

    id: str
    timestamp: datetime
    target: str
    holder: str
    sentiment: float
    weight: float = 1.0
    categories: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ModelError("id must be non-empty")
        if not self.target:
            raise ModelError("target must be non-empty")
        if not isinstance(self.timestamp, datetime):
            raise ModelError("timestamp must be a datetime")
        check_sentiment(self.sentiment)
        if not (isinstance(self.weight, (int, float)) and self.weight > 0
                and math.isfinite(self.weight)):
            raise ModelError(f"weight must be positive, got {self.weight!r}")

    def utc_day(self) -> date:
        """Calendar day of the timestamp in UTC."""
        ts = self.timestamp
        if ts.tzinfo is not None:
            ts = ts.astimezone(timezone.utc)
        return ts.date()


@dataclass(frozen=True)
class IndexPoint:
    """Reputation score for one target on one calendar day."""

    period: date
    score: float
    count: int

    def __post_init__(self) -> None:
        if not isinstance(self.period, date) or isinstance(self.period, datetime):
            raise ModelError("period must be a calendar date")
        if self.count < 0:
            raise ModelError("count must be non-negative")
        if self.count > 0:
            check_sentiment(self.score)


@dataclass(frozen=True)
class ReputationSeries:
    """Time-ordered reputation index for one target.

    Periods must be strictly increasing; duplicates are an error.
    """

    target: str
    points: tuple[IndexPoint, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.period <= prev.period:
                raise ModelError(
                    f"periods must be strictly increasing: "
                    f"{prev.period} then {cur.period}"
                )

    def __len__(self) -> int:
        return len(self.points)

    def scores(self) -> list[float]:
        return [p.score for p in self.points]

    def periods(self) -> list[date]:
        return [p.period for p in self.points]


def _parse_timestamp(raw: Any) -> datetime:
    if isinstance(raw, datetime):
        ts = raw
    elif isinstance(raw, str):
        try:
            ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
        except ValueError:
            raise ModelError(f"malformed timestamp: {raw!r}")
    else:
        raise ModelError(f"malformed timestamp: {raw!r}")
    # Naive timestamps are taken to already be UTC.
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def validate_opinion(record: Mapping[str, Any]) -> Opinion:
    """Build a validated Opinion from a raw record.

    Field names follow the on-disk JSONL schema: ``id``, ``t`` (ISO-8601
    UTC), ``target``, ``holder``, ``sentiment``, optional ``weight``
    (default 1.0) and optional ``categories`` (string array).

    Raises RejectedOpinion carrying every field-level reason found.
    """
    reasons: list[str] = []

    for name in ("id", "t", "target"):
        if not record.get(name):
            reasons.append(f"missing {name}")

    timestamp = None
    if record.get("t"):
        try:
            timestamp = _parse_timestamp(record["t"])
        except ModelError as exc:
            reasons.append(str(exc))

    sentiment = record.get("sentiment")
    if sentiment is None:
        reasons.append("missing sentiment")
    else:
        try:
            sentiment = check_sentiment(sentiment)
        except ModelError as exc:
            reasons.append(str(exc))

    weight = record.get("weight", 1.0)
    try:
        weight = float(weight)
        if not (weight > 0 and math.isfinite(weight)):
            reasons.append("weight must be positive")
    except (TypeError, ValueError):
        reasons.append(f"weight must be a number, got {weight!r}")

    categories = record.get("categories", ())
    if isinstance(categories, (list, tuple)) and all(
        isinstance(c, str) for c in categories
    ):
        categories = tuple(categories)
    else:
        reasons.append("categories must be a list of strings")

    if reasons:
        raise RejectedOpinion(reasons)

    return Opinion(
        id=str(record["id"]),
        timestamp=timestamp,
        target=str(record["target"]),
        holder=str(record.get("holder", "")),
        sentiment=sentiment,
        weight=weight,
        categories=categories,
    )
