"""Feed parsing: opinion JSONL streams and pre-aggregated score CSVs.

Parsers are single-pass and stateless.  JSONL parsing isolates bad lines
as per-line rejections; CSV parsing is strict and fails hard, because a
silently dropped or clamped score would bias exactly the statistics this
package measures.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date
from typing import IO, Iterable

from .model import Opinion, RejectedOpinion, validate_opinion

SCORES_CSV_HEADER = ["date", "entity", "score"]


class IngestError(ValueError):
    """Hard error in a score-series feed (bad header, bad row, duplicate)."""


@dataclass(frozen=True)
class Rejection:
    """One rejected opinion feed line."""

    line: int
    reason: str


@dataclass(frozen=True)
class NativeRange:
    """Source score range to be mapped linearly onto [-1, 1]."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise IngestError(f"native range requires lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class ScoreRow:
    """One pre-aggregated score observation."""

    date: date
    entity: str
    score: float


def scale_linear(x: float, native: NativeRange) -> float:
    """Map x from its native range onto [-1, 1].

    Endpoints map exactly: scale_linear(lo) == -1, scale_linear(hi) == 1.
    """
    if not native.lo <= x <= native.hi:
        raise IngestError(
            f"score {x} outside native range [{native.lo}, {native.hi}]"
        )
    if x == native.lo:
        return -1.0
    if x == native.hi:
        return 1.0
    return -1.0 + 2.0 * (x - native.lo) / (native.hi - native.lo)


def parse_opinions_jsonl(
    stream: IO[str] | Iterable[str],
) -> tuple[list[Opinion], list[Rejection]]:
    """Parse an opinion feed, one JSON object per line.

    Every non-blank line becomes exactly one Opinion or one Rejection
    with its 1-based line number; order is preserved and a bad line never
    aborts the parse.
    """
    opinions: list[Opinion] = []
    rejections: list[Rejection] = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            rejections.append(Rejection(lineno, f"malformed JSON: {exc.msg}"))
            continue
        if not isinstance(record, dict):
            rejections.append(Rejection(lineno, "line is not a JSON object"))
            continue
        try:
            opinions.append(validate_opinion(record))
        except RejectedOpinion as exc:
            rejections.append(Rejection(lineno, str(exc)))
    return opinions, rejections


def parse_scores_csv(
    stream: IO[str] | Iterable[str],
    native: NativeRange | None = None,
) -> dict[str, list[ScoreRow]]:
    """Parse a score-series CSV into per-entity, date-sorted rows.

    Header must be exactly ``date,entity,score``.  If ``native`` is
    given, every score is passed through scale_linear.  Duplicate
    (date, entity) pairs and out-of-range results are hard errors.
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty scores CSV: missing header")
    if [h.strip() for h in header] != SCORES_CSV_HEADER:
        raise IngestError(
            f"bad header {header!r}, expected {','.join(SCORES_CSV_HEADER)}"
        )

    by_entity: dict[str, list[ScoreRow]] = {}
    seen: set[tuple[date, str]] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise IngestError(f"line {lineno}: expected 3 fields, got {len(row)}")
        raw_date, entity, raw_score = (f.strip() for f in row)
        try:
            day = date.fromisoformat(raw_date)
        except ValueError:
            raise IngestError(f"line {lineno}: unparseable date {raw_date!r}")
        try:
            score = float(raw_score)
        except ValueError:
            raise IngestError(f"line {lineno}: unparseable score {raw_score!r}")
        if native is not None:
            score = scale_linear(score, native)
        if not -1.0 <= score <= 1.0:
            raise IngestError(
                f"line {lineno}: score {score} outside [-1, 1] after scaling"
            )
        key = (day, entity)
        if key in seen:
            raise IngestError(f"line {lineno}: duplicate (date, entity) = {key}")
        seen.add(key)
        by_entity.setdefault(entity, []).append(ScoreRow(day, entity, score))

    for rows in by_entity.values():
        rows.sort(key=lambda r: r.date)
    return by_entity


def write_scores_csv(stream: IO[str], rows: Iterable[ScoreRow]) -> None:
    """Serialize score rows in the canonical CSV schema.

    Scores are written with repr precision so a parse -> write -> parse
    round trip is lossless.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SCORES_CSV_HEADER)
    for row in rows:
        writer.writerow([row.date.isoformat(), row.entity, repr(row.score)])


def opinion_to_record(opinion: Opinion) -> dict:
    """Canonical JSONL record for an opinion."""
    record = {
        "id": opinion.id,
        "t": opinion.timestamp.isoformat().replace("+00:00", "Z"),
        "target": opinion.target,
        "holder": opinion.holder,
        "sentiment": opinion.sentiment,
        "weight": opinion.weight,
    }
    if opinion.categories:
        record["categories"] = list(opinion.categories)
    return record


def write_opinions_jsonl(stream: IO[str], opinions: Iterable[Opinion]) -> None:
    for opinion in opinions:
        stream.write(json.dumps(opinion_to_record(opinion)) + "\n")
