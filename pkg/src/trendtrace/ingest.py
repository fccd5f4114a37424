"""Download-event parsing and DOI linkage against the corpus."""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, Sequence

from .corpus import ArticleRecord, Corpus, Source, normalize_doi

log = logging.getLogger(__name__)

TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


class MalformedEvent(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class DownloadEvent:
    ts: datetime
    doi: str
    title: str = ""
    authors: tuple[str, ...] = ()

    @property
    def day(self):
        return self.ts.date()


@dataclass(frozen=True)
class Weights:
    indexed: float = 1.0
    online_first: float = 0.0

    def __post_init__(self) -> None:
        for w in (self.indexed, self.online_first):
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {w} outside [0, 1]")

    def for_source(self, source: Source) -> float:
        return self.indexed if source is Source.INDEXED else self.online_first


@dataclass(frozen=True)
class LinkedEvent:
    event: DownloadEvent
    record: ArticleRecord | None
    weight: float

    @property
    def matched(self) -> bool:
        return self.record is not None


@dataclass(frozen=True)
class LinkReport:
    matched_indexed: int = 0
    matched_onlinefirst: int = 0
    unmatched: int = 0

    @property
    def total(self) -> int:
        return self.matched_indexed + self.matched_onlinefirst + self.unmatched

    def as_dict(self) -> dict[str, int]:
        return {
            "matched_indexed": self.matched_indexed,
            "matched_onlinefirst": self.matched_onlinefirst,
            "unmatched": self.unmatched,
            "total": self.total,
        }


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 instant to an aware UTC datetime at second resolution.

    Naive timestamps are taken as UTC.
    """
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime(TS_FORMAT)


def _parse_line(line: str, lineno: int) -> DownloadEvent:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedEvent(lineno, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise MalformedEvent(lineno, "expected a JSON object")
    raw_doi = obj.get("doi")
    if not isinstance(raw_doi, str) or not normalize_doi(raw_doi):
        raise MalformedEvent(lineno, "missing doi")
    raw_ts = obj.get("ts")
    if not isinstance(raw_ts, str):
        raise MalformedEvent(lineno, "missing ts")
    try:
        ts = parse_timestamp(raw_ts)
    except ValueError:
        raise MalformedEvent(lineno, f"bad timestamp {raw_ts!r}") from None
    authors = obj.get("authors") or []
    if not isinstance(authors, list) or not all(isinstance(a, str) for a in authors):
        raise MalformedEvent(lineno, "authors must be an array of strings")
    title = obj.get("title") or ""
    if not isinstance(title, str):
        raise MalformedEvent(lineno, "title must be a string")
    return DownloadEvent(ts=ts, doi=normalize_doi(raw_doi), title=title, authors=tuple(authors))


def parse_events(
    source: str | Path | IO[str] | Iterable[str],
    *,
    lenient: bool = False,
    errors: list[MalformedEvent] | None = None,
) -> list[DownloadEvent]:
    """Parse a JSON Lines event stream, keeping file order.

    In lenient mode malformed lines are skipped, logged, and appended to
    ``errors`` when a list is given.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return parse_events(fh, lenient=lenient, errors=errors)
    events = []
    for lineno, line in enumerate(source, 1):
        if not line.strip():
            continue
        try:
            events.append(_parse_line(line, lineno))
        except MalformedEvent as exc:
            if not lenient:
                raise
            log.warning("skipping event %s", exc)
            if errors is not None:
                errors.append(exc)
    return events


def event_to_json(ev: DownloadEvent) -> str:
    return json.dumps(
        {"ts": format_timestamp(ev.ts), "doi": ev.doi, "title": ev.title, "authors": list(ev.authors)},
        ensure_ascii=False,
    )


def write_events(events: Iterable[DownloadEvent], dest: str | Path | IO[str]) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            write_events(events, fh)
        return
    for ev in events:
        dest.write(event_to_json(ev))
        dest.write("\n")


def merge_streams(*streams: Sequence[DownloadEvent]) -> list[DownloadEvent]:
    """Concatenate streams ordered by timestamp; ties keep stream then file order."""
    return sorted(itertools.chain.from_iterable(streams), key=lambda ev: ev.ts)


def link_events(
    events: Iterable[DownloadEvent],
    corpus: Corpus,
    weights: Weights = Weights(),
) -> tuple[list[LinkedEvent], LinkReport]:
    linked = []
    n_indexed = n_online = n_unmatched = 0
    for ev in events:
        rec = corpus.get(ev.doi)
        if rec is None:
            n_unmatched += 1
            linked.append(LinkedEvent(ev, None, 0.0))
            continue
        if rec.source is Source.INDEXED:
            n_indexed += 1
        else:
            n_online += 1
        linked.append(LinkedEvent(ev, rec, weights.for_source(rec.source)))
    return linked, LinkReport(n_indexed, n_online, n_unmatched)
