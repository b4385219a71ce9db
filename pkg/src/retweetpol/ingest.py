"""Tweet archive parsing, filtering, monthly bucketing and graph building.

Input is a JSONL or CSV dump with one record per tweet (schema documented in
the README); output is one mutual-retweet graph per calendar month plus user
metadata.  Parsing is streaming and single-pass; malformed lines are counted
and reported rather than fatal, up to a 1% budget.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .graph import MonthlyGraph, empty_graph

logger = logging.getLogger(__name__)

MALFORMED_BUDGET = 0.01  # schema error above this malformed-line ratio
_REPORTED_LINES = 5


class SchemaError(ValueError):
    """Too many malformed lines in an archive."""


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    author_id: str
    created_at: datetime           # timezone-aware UTC
    text: str
    lang: str
    retweet_of_author_id: str | None
    author_verified: bool
    author_followers: int

    @property
    def is_retweet(self) -> bool:
        return self.retweet_of_author_id is not None


@dataclass
class UserMeta:
    user_id: str
    verified: bool = False
    followers: int = 0
    handle: str | None = None


@dataclass
class MonthBucket:
    month_index: int               # 1-based
    start: datetime
    end: datetime                  # exclusive
    records: list[TweetRecord] = field(default_factory=list)


@dataclass
class ParseReport:
    records: list[TweetRecord]
    malformed: list[int]           # offending line numbers (1-based)
    duplicates: int
    total_lines: int


def _parse_timestamp(raw: str) -> datetime:
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _as_id(value) -> str:
    if isinstance(value, str):
        if not value:
            raise ValueError("empty identifier")
        return value
    if isinstance(value, int):
        return str(value)
    raise ValueError(f"bad identifier {value!r}")


def _record_from_json(obj: dict) -> TweetRecord:
    retweet = obj["retweet_of_author_id"]
    followers = obj["author_followers"]
    verified = obj["author_verified"]
    if not isinstance(followers, int) or isinstance(followers, bool) or followers < 0:
        raise ValueError("author_followers must be a non-negative integer")
    if not isinstance(verified, bool):
        raise ValueError("author_verified must be a boolean")
    return TweetRecord(
        tweet_id=_as_id(obj["id"]),
        author_id=_as_id(obj["author_id"]),
        created_at=_parse_timestamp(obj["created_at"]),
        text=str(obj["text"]),
        lang=str(obj["lang"]),
        retweet_of_author_id=None if retweet is None else _as_id(retweet),
        author_verified=verified,
        author_followers=followers,
    )


_TRUE = {"true", "1", "t"}
_FALSE = {"false", "0", "f", ""}


def _record_from_csv(row: dict) -> TweetRecord:
    retweet = row["retweet_of_author_id"]
    flag = row["author_verified"].strip().lower()
    if flag in _TRUE:
        verified = True
    elif flag in _FALSE:
        verified = False
    else:
        raise ValueError(f"bad author_verified {row['author_verified']!r}")
    followers = int(row["author_followers"])
    if followers < 0:
        raise ValueError("author_followers must be non-negative")
    return TweetRecord(
        tweet_id=_as_id(row["id"]),
        author_id=_as_id(row["author_id"]),
        created_at=_parse_timestamp(row["created_at"]),
        text=row["text"],
        lang=row["lang"],
        retweet_of_author_id=_as_id(retweet) if retweet else None,
        author_verified=verified,
        author_followers=followers,
    )


def parse_archive(source, fmt: str) -> ParseReport:
    """Parse a JSONL or CSV archive into tweet records.

    ``source`` may be a path or a text/binary file object.  Malformed lines
    (bad JSON, missing keys, bad values) are skipped and counted; if they
    exceed 1% of all lines a SchemaError names the first offending line
    numbers.  Duplicate tweet_ids keep the first occurrence.
    """
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unknown archive format {fmt!r}")
    close = False
    if isinstance(source, (str, Path)):
        try:
            fh = open(source, "r", encoding="utf-8", newline="")
        except OSError as exc:
            raise OSError(f"cannot read archive {source}: {exc}") from exc
        close = True
    elif isinstance(source, (bytes, bytearray)):
        fh = io.StringIO(source.decode("utf-8"))
    elif hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        fh = io.StringIO(data)
    else:
        raise TypeError(f"unsupported source {type(source)!r}")
    try:
        if fmt == "jsonl":
            report = _parse_jsonl(fh)
        else:
            report = _parse_csv(fh)
    finally:
        if close:
            fh.close()
    # one malformed line is always tolerated so tiny fixtures stay parseable
    if len(report.malformed) > max(1.0, MALFORMED_BUDGET * report.total_lines):
        head = ", ".join(str(ln) for ln in report.malformed[:_REPORTED_LINES])
        raise SchemaError(
            f"{len(report.malformed)} of {report.total_lines} lines malformed "
            f"(> {MALFORMED_BUDGET:.0%}); first offending lines: {head}"
        )
    if report.malformed:
        logger.warning(
            "skipped %d malformed lines (first: %s)",
            len(report.malformed),
            report.malformed[:_REPORTED_LINES],
        )
    return report


def _parse_jsonl(fh) -> ParseReport:
    records: list[TweetRecord] = []
    malformed: list[int] = []
    seen: set[str] = set()
    duplicates = 0
    total = 0
    for lineno, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        total += 1
        try:
            rec = _record_from_json(json.loads(line))
        except (ValueError, KeyError, TypeError):
            malformed.append(lineno)
            continue
        if rec.tweet_id in seen:
            duplicates += 1
            continue
        seen.add(rec.tweet_id)
        records.append(rec)
    return ParseReport(records, malformed, duplicates, total)


_CSV_COLUMNS = [
    "id", "author_id", "created_at", "text", "lang",
    "retweet_of_author_id", "author_verified", "author_followers",
]


def _parse_csv(fh) -> ParseReport:
    rdr = csv.reader(fh)
    try:
        header = next(rdr)
    except StopIteration:
        return ParseReport([], [], 0, 0)
    missing = [c for c in _CSV_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"CSV header missing columns: {missing}")
    pos = {c: header.index(c) for c in _CSV_COLUMNS}
    records: list[TweetRecord] = []
    malformed: list[int] = []
    seen: set[str] = set()
    duplicates = 0
    total = 0
    for rowno, row in enumerate(rdr, start=2):  # header is row 1
        if not row:
            continue
        total += 1
        try:
            rec = _record_from_csv({c: row[pos[c]] for c in _CSV_COLUMNS})
        except (ValueError, KeyError, IndexError):
            malformed.append(rowno)
            continue
        if rec.tweet_id in seen:
            duplicates += 1
            continue
        seen.add(rec.tweet_id)
        records.append(rec)
    return ParseReport(records, malformed, duplicates, total)


def write_archive_csv(records: Iterable[TweetRecord], path) -> None:
    """Emit records in the CSV archive schema (round-trip helper)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_CSV_COLUMNS)
        for r in records:
            w.writerow([
                r.tweet_id,
                r.author_id,
                r.created_at.strftime("%Y-%m-%dT%H:%M:%S+00:00"),
                r.text,
                r.lang,
                r.retweet_of_author_id or "",
                "true" if r.author_verified else "false",
                r.author_followers,
            ])


def filter_records(
    records: Sequence[TweetRecord], keywords: Sequence[str], lang: str
) -> list[TweetRecord]:
    """Keep records in ``lang`` whose text contains at least one keyword,
    case-insensitive substring match, order preserved."""
    if not keywords:
        raise ValueError("keyword list must be non-empty")
    kws = [k.lower() for k in keywords]
    out = []
    for r in records:
        if r.lang != lang:
            continue
        text = r.text.lower()
        if any(k in text for k in kws):
            out.append(r)
    return out


def _month_index(d: datetime, start: date) -> int:
    return (d.year - start.year) * 12 + (d.month - start.month)


def bucket_by_month(
    records: Sequence[TweetRecord], range_start: date, range_end: date
) -> tuple[list[MonthBucket], int]:
    """Partition records into calendar-month buckets over [start, end).

    Both bounds must be first-of-month dates; intervals are half-open in
    UTC.  Returns the buckets plus the count of out-of-range records.
    """
    if range_start >= range_end:
        raise ValueError(f"inverted range {range_start}..{range_end}")
    if range_start.day != 1 or range_end.day != 1:
        raise ValueError("range bounds must be first-of-month dates")
    n_months = _month_index(
        datetime(range_end.year, range_end.month, 1, tzinfo=timezone.utc), range_start
    )
    starts = []
    y, mo = range_start.year, range_start.month
    for _ in range(n_months + 1):
        starts.append(datetime(y, mo, 1, tzinfo=timezone.utc))
        y, mo = (y + 1, 1) if mo == 12 else (y, mo + 1)
    buckets = [
        MonthBucket(i + 1, starts[i], starts[i + 1]) for i in range(n_months)
    ]
    dropped = 0
    lo, hi = starts[0], starts[-1]
    for r in records:
        if not lo <= r.created_at < hi:
            dropped += 1
            continue
        buckets[_month_index(r.created_at, range_start)].records.append(r)
    if dropped:
        logger.info("dropped %d records outside %s..%s", dropped, range_start, range_end)
    return buckets, dropped


def build_retweet_graph(bucket: MonthBucket) -> MonthlyGraph:
    """Mutual-retweet graph for one month.

    Nodes are the users on either end of a retweet; the undirected edge
    {u, v} exists once at least one retweet occurred in either direction and
    its weight is the total retweet count both ways.  Self-retweets are
    discarded; node indices follow lexicographic user_id order so the result
    is independent of record order.
    """
    pair_w: dict[tuple[str, str], int] = {}
    users: set[str] = set()
    for r in bucket.records:
        target = r.retweet_of_author_id
        if target is None or target == r.author_id:
            continue
        a, b = (r.author_id, target) if r.author_id < target else (target, r.author_id)
        pair_w[(a, b)] = pair_w.get((a, b), 0) + 1
        users.add(a)
        users.add(b)
    if not users:
        return empty_graph(bucket.month_index)
    ids = sorted(users)
    index = {u: i for i, u in enumerate(ids)}
    edges = [(index[a], index[b], w) for (a, b), w in sorted(pair_w.items())]
    return MonthlyGraph.from_edges(bucket.month_index, ids, edges)


def collect_user_meta(records: Iterable[TweetRecord]) -> dict[str, UserMeta]:
    """Aggregate per-user metadata: followers is the maximum observed value
    and verified is true if ever observed true."""
    meta: dict[str, UserMeta] = {}
    for r in records:
        m = meta.get(r.author_id)
        if m is None:
            meta[r.author_id] = UserMeta(
                r.author_id, r.author_verified, r.author_followers
            )
        else:
            m.verified = m.verified or r.author_verified
            if r.author_followers > m.followers:
                m.followers = r.author_followers
    return meta


def tweet_counts(bucket: MonthBucket) -> dict[str, int]:
    """Tweets authored per user in the bucket (originals and retweets)."""
    counts: dict[str, int] = {}
    for r in bucket.records:
        counts[r.author_id] = counts.get(r.author_id, 0) + 1
    return counts
