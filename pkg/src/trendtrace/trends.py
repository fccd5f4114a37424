"""Keyword download share, downloads-per-paper, and emerging-trend detection.

A keyword is flagged as emerging when it first appeared in the corpus
recently, is downloaded often enough, and draws many downloads per
published paper.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .aggregate import Window, WindowStats, top_keywords
from .corpus import Corpus


class TrendError(ValueError):
    pass


class ZeroTotal(TrendError):
    """Total downloads of a window is zero, so shares are undefined."""


class NoPapers(TrendError):
    """A downloaded keyword has no paper in the corpus."""


@dataclass(frozen=True)
class TrendConfig:
    min_downloads: float = 50
    min_ratio2: float = 20
    newness_window_years: int = 6
    # None: use the year of the analysed window's last day.
    reference_year: int | None = None
    top_k: int = 50

    def __post_init__(self) -> None:
        if self.min_downloads <= 0 or self.min_ratio2 <= 0:
            raise ValueError("thresholds must be positive")
        if self.newness_window_years <= 0 or self.top_k <= 0:
            raise ValueError("newness_window_years and top_k must be positive")


@dataclass(frozen=True)
class TrendEntry:
    keyword: str
    downloads: float
    paper_count: int
    ratio2: float | None
    first_year: int | None
    is_new: bool
    enough_downloads: bool
    high_ratio: bool

    @property
    def emerging(self) -> bool:
        return self.is_new and self.enough_downloads and self.high_ratio

    @property
    def no_papers(self) -> bool:
        return self.ratio2 is None


def ratio1(keyword_downloads: float, total_downloads: float) -> float:
    """Share of a window's downloads that carry the keyword."""
    if total_downloads <= 0:
        raise ZeroTotal("total downloads is zero")
    return keyword_downloads / total_downloads


def ratio2(downloads: float, paper_count: int) -> float:
    """Downloads per corpus paper carrying the keyword."""
    if paper_count <= 0:
        raise NoPapers("keyword has no papers in the corpus")
    return downloads / paper_count


def evaluate_keyword(
    keyword: str,
    downloads: float,
    paper_count: int,
    first_year: int | None,
    cfg: TrendConfig,
    reference_year: int,
) -> TrendEntry:
    try:
        r2: float | None = ratio2(downloads, paper_count)
    except NoPapers:
        r2 = None
    return TrendEntry(
        keyword=keyword,
        downloads=downloads,
        paper_count=paper_count,
        ratio2=r2,
        first_year=first_year,
        is_new=first_year is not None and first_year >= reference_year - cfg.newness_window_years,
        enough_downloads=downloads >= cfg.min_downloads,
        high_ratio=r2 is not None and r2 > cfg.min_ratio2,
    )


def sort_entries(entries: Sequence[TrendEntry]) -> list[TrendEntry]:
    """Descending ratio2, ties by keyword; entries without ratio2 go last."""
    return sorted(
        entries,
        key=lambda e: (e.ratio2 is None, -(e.ratio2 or 0.0), e.keyword),
    )


def detect_emerging(stats: WindowStats, corpus: Corpus, cfg: TrendConfig = TrendConfig()) -> list[TrendEntry]:
    """Evaluate the ``top_k`` most downloaded keywords of a window.

    All candidates are returned, emerging or not. A keyword that has
    downloads but no corpus papers yields an entry with ``ratio2=None``
    that is never emerging.
    """
    ref = cfg.reference_year if cfg.reference_year is not None else stats.window.end.year
    entries = [
        evaluate_keyword(kw, count, corpus.papers_with_keyword(kw), corpus.first_year(kw), cfg, ref)
        for kw, count in top_keywords(stats.keyword_counts, cfg.top_k)
    ]
    return sort_entries(entries)


def emerging_keywords(entries: Sequence[TrendEntry]) -> list[str]:
    return [e.keyword for e in entries if e.emerging]


def weekly_ratio_series(
    keyword: str,
    windows: Sequence[Window],
    per_window_stats: Sequence[WindowStats],
    raw_denominator: bool = False,
) -> list[tuple[str, float]]:
    """The keyword's download share in each window, in window order.

    The denominator is the window's weighted total unless ``raw_denominator``.
    """
    if len(windows) != len(per_window_stats):
        raise ValueError("windows and stats are not aligned")
    series = []
    for w, st in zip(windows, per_window_stats):
        if st.window != w:
            raise ValueError(f"stats for {st.window.label!r} do not match window {w.label!r}")
        total = st.total_raw_downloads if raw_denominator else st.total_weighted_downloads
        try:
            series.append((w.label, ratio1(st.keyword_counts.get(keyword, 0.0), total)))
        except ZeroTotal:
            raise ZeroTotal(f"window {w.label!r} has no downloads") from None
    return series
