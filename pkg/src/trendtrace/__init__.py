"""Trace emerging research trends from article download events.

Download events are linked to a bibliographic corpus by DOI, aggregated into
weighted keyword download counts per time window, and screened for keywords
that are new, heavily downloaded, and downloaded far more often than their
publication count would suggest.
"""

from ._kernels import BACKEND
from .aggregate import (
    ArticleRanking,
    Window,
    WindowStats,
    build_window_stats,
    daily_counts,
    keyword_counts,
    make_windows,
    span_window,
    top_articles,
    top_keywords,
    weekly_windows,
)
from .corpus import (
    ArticleRecord,
    Corpus,
    CorpusError,
    DuplicateDoi,
    MalformedRow,
    MissingDoi,
    Source,
    dump_corpus,
    first_year,
    load_corpus,
    normalize_doi,
    papers_with_keyword,
    resolve_keywords,
)
from .ingest import (
    DownloadEvent,
    LinkedEvent,
    LinkReport,
    MalformedEvent,
    Weights,
    link_events,
    merge_streams,
    parse_events,
    write_events,
)
from .keywords import EmptyKeyword, Normalizer, default_normalizer, normalize, segment_title
from .report import ScatterPoint, TagCloudItem, scatter_data, tagcloud_data
from .simulate import EmptyCorpus, SimConfig, simulate_trace, write_trace
from .trends import (
    NoPapers,
    TrendConfig,
    TrendEntry,
    ZeroTotal,
    detect_emerging,
    emerging_keywords,
    evaluate_keyword,
    ratio1,
    ratio2,
    weekly_ratio_series,
)

__version__ = "0.1.0"
