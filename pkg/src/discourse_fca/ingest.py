"""Enriched comment records and the two per-condition formal contexts built from them.

Every context row carries exactly seven attributes out of the fixed
25-attribute vocabulary: one sentiment, one topic, and a high/low bin for
each of the five traits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from datetime import datetime, timezone
from typing import BinaryIO, Iterable, NamedTuple, Sequence

from .context import FormalContext
from .errors import DuplicateObject, EmptyInput, SchemaMismatch

CONDITIONS = ("VI", "HI")
SENTIMENTS = ("Positive", "Neutral", "Negative")
TOPICS = (
    "positivity",
    "appearance",
    "authenticity_critique",
    "artificial_identity",
    "parasocial",
    "brand_ads",
    "criticism",
    "humor",
    "performance",
    "mental_health",
    "body_image",
    "social_comparison",
)
TRAITS = ("Openness", "Conscientiousness", "Extraversion", "Agreeableness", "Neuroticism")
TRAIT_FIELDS = tuple(t.lower() for t in TRAITS)

VOCABULARY: tuple[str, ...] = (
    tuple(f"sentiment_{s}" for s in SENTIMENTS)
    + tuple(f"topic_{t}" for t in TOPICS)
    + tuple(f"{t}_{b}" for t in TRAITS for b in ("high", "low"))
)
SENTIMENT_INDEX = {s: i for i, s in enumerate(SENTIMENTS)}
TOPIC_INDEX = {t: len(SENTIMENTS) + i for i, t in enumerate(TOPICS)}
_TRAIT_BASE = len(SENTIMENTS) + len(TOPICS)

REQUIRED_FIELDS = ("comment_id", "influencer_id", "condition", "timestamp", "sentiment", "topic") + TRAIT_FIELDS

assert len(VOCABULARY) == 25


class Traits(NamedTuple):
    openness: float
    conscientiousness: float
    extraversion: float
    agreeableness: float
    neuroticism: float


@dataclass(frozen=True)
class CommentRecord:
    comment_id: str
    influencer_id: str
    condition: str
    timestamp: datetime
    sentiment: str
    topic: str
    traits: Traits

    @property
    def week_key(self) -> str:
        return iso_week_key(self.timestamp)

    def to_json(self) -> dict:
        out = {
            "comment_id": self.comment_id,
            "influencer_id": self.influencer_id,
            "condition": self.condition,
            "timestamp": self.timestamp.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            "sentiment": self.sentiment,
            "topic": self.topic,
        }
        out.update(zip(TRAIT_FIELDS, self.traits))
        return out


@dataclass(frozen=True)
class WeeklyObject:
    week_key: str
    modal_sentiment: str
    modal_topic: str
    mean_traits: Traits
    comment_count: int


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str


@dataclass
class LoadResult:
    records: list[CommentRecord]
    rejections: list[Rejection] = field(default_factory=list)

    @property
    def total_rows(self) -> int:
        return len(self.records) + len(self.rejections)


class RowError(ValueError):
    pass


def iso_week_key(ts: datetime) -> str:
    year, week, _ = ts.astimezone(timezone.utc).isocalendar()
    return f"{year}-W{week:02d}"


def _iso_week_sort(key: str) -> tuple[int, int]:
    year, week = key.split("-W")
    return int(year), int(week)


def normalize_sentiment(raw: str) -> str:
    s = raw.strip().casefold()
    if s.startswith("sentiment_"):
        s = s[len("sentiment_"):]
    for label in SENTIMENTS:
        if s == label.casefold():
            return label
    raise RowError(f"unknown sentiment {raw!r}")


def normalize_topic(raw: str) -> str:
    s = raw.strip().casefold().replace("-", "_").replace(" ", "_")
    if s.startswith("topic_"):
        s = s[len("topic_"):]
    if s not in TOPIC_INDEX:
        raise RowError(f"unknown topic {raw!r}")
    return s


def normalize_condition(raw: str) -> str:
    s = raw.strip().upper()
    if s not in CONDITIONS:
        raise RowError(f"unknown condition {raw!r}")
    return s


def parse_timestamp(raw: str) -> datetime:
    s = raw.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(s)
    except ValueError:
        raise RowError(f"bad timestamp {raw!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _parse_trait(name: str, value) -> float:
    if isinstance(value, bool):
        raise RowError(f"{name} is not a number")
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise RowError(f"{name} is not a number") from None
    if not math.isfinite(x):
        raise RowError(f"{name} is not finite")
    if not 0.0 <= x <= 1.0:
        raise RowError(f"trait out of range: {name}={x}")
    return x


def record_from_mapping(row: dict) -> CommentRecord:
    missing = [f for f in REQUIRED_FIELDS if row.get(f) in (None, "")]
    if missing:
        raise RowError(f"missing field(s): {', '.join(missing)}")
    for f in ("comment_id", "influencer_id", "condition", "timestamp", "sentiment", "topic"):
        if not isinstance(row[f], str):
            raise RowError(f"{f} must be a string")
    traits = Traits(*(_parse_trait(f, row[f]) for f in TRAIT_FIELDS))
    return CommentRecord(
        comment_id=row["comment_id"].strip(),
        influencer_id=row["influencer_id"].strip(),
        condition=normalize_condition(row["condition"]),
        timestamp=parse_timestamp(row["timestamp"]),
        sentiment=normalize_sentiment(row["sentiment"]),
        topic=normalize_topic(row["topic"]),
        traits=traits,
    )


def _jsonl_rows(text: io.TextIOBase):
    for lineno, line in enumerate(text, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            yield lineno, None, f"invalid JSON: {exc.msg}"
            continue
        if not isinstance(obj, dict):
            yield lineno, None, "line is not a JSON object"
            continue
        yield lineno, obj, None


def _csv_rows(text: io.TextIOBase):
    reader = csv.DictReader(text)
    if reader.fieldnames is None:
        return
    absent = [f for f in REQUIRED_FIELDS if f not in reader.fieldnames]
    if absent:
        raise SchemaMismatch(f"CSV header lacks column(s): {', '.join(absent)}")
    while True:
        try:
            row = next(reader)
        except StopIteration:
            return
        except csv.Error as exc:
            yield reader.line_num, None, f"malformed CSV: {exc}"
            continue
        yield reader.line_num, row, None


def load_records(source: BinaryIO, fmt: str = "jsonl", max_reject_fraction: float = 0.5) -> LoadResult:
    """Parse and validate records, collecting line-numbered rejections.

    Raises SchemaMismatch when more than ``max_reject_fraction`` of the rows
    are rejected.
    """
    fmt = fmt.lower()
    text = io.TextIOWrapper(source, encoding="utf-8", newline="" if fmt == "csv" else None)
    if fmt == "jsonl":
        rows = _jsonl_rows(text)
    elif fmt == "csv":
        rows = _csv_rows(text)
    else:
        raise ValueError(f"unknown input format {fmt!r}")
    result = LoadResult([])
    for lineno, row, problem in rows:
        if problem is None:
            try:
                result.records.append(record_from_mapping(row))
                continue
            except RowError as exc:
                problem = str(exc)
        result.rejections.append(Rejection(lineno, problem))
    text.detach()
    if result.total_rows and len(result.rejections) / result.total_rows > max_reject_fraction:
        raise SchemaMismatch(
            f"{len(result.rejections)} of {result.total_rows} rows rejected; "
            f"first: line {result.rejections[0].line}: {result.rejections[0].reason}"
        )
    return result


def dump_jsonl(records: Iterable[CommentRecord]) -> str:
    return "".join(json.dumps(r.to_json(), sort_keys=False) + "\n" for r in records)


def _mean_traits(traits: Sequence[Traits]) -> Traits:
    # Exact rational mean, rounded once: a value repeated n times averages to itself.
    n = len(traits)
    return Traits(*(float(sum(map(Fraction, (t[i] for t in traits))) / n) for i in range(5)))


def trait_thresholds(
    records: Sequence[CommentRecord],
    scope: str = "per_condition",
    condition: str | None = None,
) -> Traits:
    """Per-trait arithmetic mean used as the high/low cut point.

    ``per_condition`` averages over one condition's records (``condition`` may
    be omitted when the records hold only one); ``pooled`` averages over all.
    """
    if scope == "per_condition":
        if condition is None:
            present = {r.condition for r in records}
            if len(present) > 1:
                raise ValueError("records span several conditions; pass condition= or use scope='pooled'")
        else:
            records = [r for r in records if r.condition == condition]
    elif scope != "pooled":
        raise ValueError(f"unknown scope {scope!r}")
    if not records:
        raise EmptyInput("no records to derive trait thresholds from")
    return _mean_traits([r.traits for r in records])


def _binarize(sentiment: str, topic: str, traits: Sequence[float], thresholds: Sequence[float]) -> int:
    row = 1 << SENTIMENT_INDEX[sentiment] | 1 << TOPIC_INDEX[topic]
    for i, (value, cut) in enumerate(zip(traits, thresholds)):
        row |= 1 << (_TRAIT_BASE + 2 * i + (0 if value >= cut else 1))
    return row


def binarize_comment(record: CommentRecord, thresholds: Sequence[float]) -> int:
    """Seven-bit attribute row: sentiment, topic, and ``>=`` threshold -> high."""
    return _binarize(record.sentiment, record.topic, record.traits, thresholds)


def _modal(labels: Iterable[str], order: Sequence[str]) -> str:
    counts = Counter(labels)
    best = None
    for label in order:
        if counts[label] and (best is None or counts[label] > counts[best]):
            best = label
    return best


def _single_condition(records: Sequence[CommentRecord]) -> None:
    if not records:
        raise EmptyInput("no records")
    if len({r.condition for r in records}) > 1:
        raise ValueError("records must come from a single condition")


def weekly_aggregate(records: Sequence[CommentRecord]) -> list[WeeklyObject]:
    _single_condition(records)
    by_week: dict[str, list[CommentRecord]] = {}
    for r in records:
        by_week.setdefault(r.week_key, []).append(r)
    out = []
    for key in sorted(by_week, key=_iso_week_sort):
        members = by_week[key]
        out.append(
            WeeklyObject(
                week_key=key,
                modal_sentiment=_modal((r.sentiment for r in members), SENTIMENTS),
                modal_topic=_modal((r.topic for r in members), TOPICS),
                mean_traits=_mean_traits([r.traits for r in members]),
                comment_count=len(members),
            )
        )
    return out


def weekly_trait_thresholds(weeks: Sequence[WeeklyObject]) -> Traits:
    """Unweighted mean of weekly trait means."""
    if not weeks:
        raise EmptyInput("no weeks")
    return _mean_traits([w.mean_traits for w in weeks])


def build_weekly_context(
    records: Sequence[CommentRecord],
    thresholds: Sequence[float] | None = None,
) -> FormalContext:
    weeks = weekly_aggregate(records)
    if thresholds is None:
        thresholds = weekly_trait_thresholds(weeks)
    rows = [_binarize(w.modal_sentiment, w.modal_topic, w.mean_traits, thresholds) for w in weeks]
    return FormalContext(tuple(w.week_key for w in weeks), VOCABULARY, tuple(rows))


def build_comment_context(
    records: Sequence[CommentRecord],
    thresholds: Sequence[float] | None = None,
) -> FormalContext:
    _single_condition(records)
    seen: set[str] = set()
    for r in records:
        if r.comment_id in seen:
            raise DuplicateObject(f"duplicate comment_id {r.comment_id!r}")
        seen.add(r.comment_id)
    if thresholds is None:
        thresholds = trait_thresholds(records, "per_condition")
    rows = [binarize_comment(r, thresholds) for r in records]
    return FormalContext(tuple(r.comment_id for r in records), VOCABULARY, tuple(rows))


def split_by_condition(records: Iterable[CommentRecord]) -> dict[str, list[CommentRecord]]:
    out: dict[str, list[CommentRecord]] = {}
    for r in records:
        out.setdefault(r.condition, []).append(r)
    return out
