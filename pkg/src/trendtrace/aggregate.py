"""Windowed download statistics: daily totals, article and keyword rankings."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .corpus import ArticleRecord, Corpus
from .ingest import DownloadEvent, LinkedEvent
from .keywords import Normalizer


@dataclass(frozen=True)
class Window:
    """Inclusive range of UTC calendar days."""

    start: date
    end: date
    label: str = ""

    def __post_init__(self) -> None:
        if self.end < self.start:
            raise ValueError(f"window end {self.end} precedes start {self.start}")

    @property
    def days(self) -> int:
        return (self.end - self.start).days + 1

    def dates(self) -> list[date]:
        return [self.start + timedelta(days=i) for i in range(self.days)]

    def __contains__(self, day: date) -> bool:
        return self.start <= day <= self.end


def make_windows(start: date, length_days: int, count: int, prefix: str = "week") -> list[Window]:
    if count < 1 or length_days < 1:
        raise ValueError("window length and count must be >= 1")
    return [
        Window(
            start + timedelta(days=length_days * i),
            start + timedelta(days=length_days * (i + 1) - 1),
            f"{prefix}{i + 1}",
        )
        for i in range(count)
    ]


def weekly_windows(start: date, k: int) -> list[Window]:
    """``k`` consecutive 7-day windows labelled week1..weekk."""
    return make_windows(start, 7, k, "week")


def _event(ev: LinkedEvent | DownloadEvent) -> DownloadEvent:
    return ev.event if isinstance(ev, LinkedEvent) else ev


def span_window(events: Iterable[LinkedEvent | DownloadEvent], label: str = "all") -> Window:
    """Smallest window covering every event."""
    days = [_event(ev).ts.date() for ev in events]
    if not days:
        raise ValueError("no events")
    return Window(min(days), max(days), label)


def in_window(events: Iterable[LinkedEvent], window: Window) -> list[LinkedEvent]:
    return [ev for ev in events if ev.event.ts.date() in window]


def daily_counts(events: Iterable[LinkedEvent | DownloadEvent], window: Window) -> list[tuple[date, int]]:
    """Raw per-day event counts over the window, zero-filled."""
    offsets = np.fromiter(
        ((_event(ev).ts.date() - window.start).days for ev in events), dtype=np.int64
    )
    counts = _kernels.bincount(offsets, window.days)
    return list(zip(window.dates(), (int(c) for c in counts)))


def _keyword_counts(events: Sequence[LinkedEvent], corpus: Corpus) -> dict[str, float]:
    m = corpus.matrix
    record_idx = np.fromiter(
        (m.doi_pos.get(ev.record.doi, -1) if ev.record is not None else -1 for ev in events),
        dtype=np.int64,
        count=len(events),
    )
    weights = np.fromiter((ev.weight for ev in events), dtype=np.float64, count=len(events))
    sums = _kernels.accumulate_keywords(record_idx, weights, m.indptr, m.indices, len(m.keywords))
    # Zero totals are dropped so weight-0 traffic leaves no trace in the result.
    return {m.keywords[i]: float(sums[i]) for i in np.flatnonzero(sums)}


def keyword_counts(
    events: Iterable[LinkedEvent],
    corpus: Corpus,
    window: Window | None = None,
    normalizer: Normalizer | None = None,
) -> dict[str, float]:
    """Weighted downloads per canonical keyword.

    Each matched event in the window adds its weight to every keyword of its
    record. Keywords whose total is zero are omitted. Passing a normalizer
    other than the corpus's re-indexes the corpus with it first.
    """
    if normalizer is not None and normalizer != corpus.normalizer:
        corpus = Corpus.build(corpus.records.values(), normalizer)
    evs = list(events) if window is None else in_window(events, window)
    return _keyword_counts(evs, corpus)


@dataclass
class WindowStats:
    window: Window
    total_raw_downloads: int = 0
    total_weighted_downloads: float = 0.0
    article_counts: dict[str, int] = field(default_factory=dict)
    article_weights: dict[str, float] = field(default_factory=dict)
    keyword_counts: dict[str, float] = field(default_factory=dict)

    def merge(self, other: "WindowStats", window: Window | None = None) -> "WindowStats":
        """Element-wise sum; the result covers ``window`` or the union span."""
        if window is None:
            window = Window(
                min(self.window.start, other.window.start),
                max(self.window.end, other.window.end),
                self.window.label if self.window.label == other.window.label else "merged",
            )
        return WindowStats(
            window=window,
            total_raw_downloads=self.total_raw_downloads + other.total_raw_downloads,
            total_weighted_downloads=self.total_weighted_downloads + other.total_weighted_downloads,
            article_counts=_add(self.article_counts, other.article_counts),
            article_weights=_add(self.article_weights, other.article_weights),
            keyword_counts=_add(self.keyword_counts, other.keyword_counts),
        )

    def conservation_gap(self, corpus: Corpus, events: Iterable[LinkedEvent]) -> float:
        """|sum of keyword counts - sum over in-window events of weight * keyword count|."""
        expected = sum(
            ev.weight * len(corpus.keywords_of(ev.record.doi))
            for ev in in_window(events, self.window)
            if ev.record is not None
        )
        return abs(sum(self.keyword_counts.values()) - expected)


def _add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return dict(sorted(out.items()))


def build_window_stats(events: Iterable[LinkedEvent], corpus: Corpus, window: Window) -> WindowStats:
    evs = in_window(events, window)
    counts: Counter[str] = Counter()
    weights: dict[str, float] = {}
    for ev in evs:
        counts[ev.event.doi] += 1
        weights[ev.event.doi] = weights.get(ev.event.doi, 0.0) + ev.weight
    return WindowStats(
        window=window,
        total_raw_downloads=len(evs),
        total_weighted_downloads=float(sum(ev.weight for ev in evs)),
        article_counts=dict(sorted(counts.items())),
        article_weights=dict(sorted(weights.items())),
        keyword_counts=_keyword_counts(evs, corpus),
    )


@dataclass
class ArticleRanking:
    ranked: list[tuple[ArticleRecord, float]]
    unmatched: list[tuple[str, float]]


def _ranked(items: Iterable[tuple[str, float]]) -> list[tuple[str, float]]:
    return sorted(items, key=lambda kv: (-kv[1], kv[0]))


def top_articles(stats: WindowStats, corpus: Corpus, n: int, weighted: bool = False) -> ArticleRanking:
    """Most downloaded articles, descending count then ascending DOI.

    DOIs missing from the corpus are listed separately in ``unmatched``.
    """
    source = stats.article_weights if weighted else stats.article_counts
    ranked = []
    unmatched = []
    for doi, count in _ranked(source.items()):
        rec = corpus.get(doi)
        if rec is None:
            unmatched.append((doi, count))
        elif len(ranked) < n:
            ranked.append((rec, count))
    return ArticleRanking(ranked, unmatched)


def top_keywords(counts: dict[str, float], n: int) -> list[tuple[str, float]]:
    """Most downloaded keywords, descending count then ascending keyword."""
    return _ranked(counts.items())[: max(n, 0)]
