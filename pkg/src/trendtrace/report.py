"""Machine-readable report tables: rankings, trend tables, scatter, series, tag cloud.

Every table is a list of row dicts with a fixed column order and can be
written as CSV or as a JSON array of objects with the same values. Ratios
are rounded to 4 significant digits; counts are exact (3 decimals when
fractional).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .aggregate import ArticleRanking, WindowStats, top_keywords
from .trends import TrendEntry

FORMATS = ("csv", "json")

STATS_COLUMNS = ("window_label", "key_type", "key", "count")
TREND_COLUMNS = (
    "keyword",
    "downloads",
    "paper_count",
    "ratio2",
    "first_year",
    "is_new",
    "enough_downloads",
    "high_ratio",
    "emerging",
)
SCATTER_COLUMNS = ("keyword", "paper_count", "ratio2", "emerging")
SERIES_COLUMNS = ("keyword", "window_label", "ratio1")
TAGCLOUD_COLUMNS = ("keyword", "count", "size")
DAILY_COLUMNS = ("date", "count")


@dataclass(frozen=True)
class ScatterPoint:
    keyword: str
    x: int
    y: float
    emerging: bool


@dataclass(frozen=True)
class TagCloudItem:
    keyword: str
    count: float
    size: float


def sig4(x: float | None) -> float | None:
    if x is None:
        return None
    return float(f"{x:.4g}")


def exact_count(x: float) -> int | float:
    return int(x) if float(x).is_integer() else round(float(x), 3)


def scatter_data(entries: Iterable[TrendEntry]) -> list[ScatterPoint]:
    """One point per entry with a defined ratio2: x = papers, y = ratio2."""
    points = [
        ScatterPoint(e.keyword, e.paper_count, e.ratio2, e.emerging)
        for e in entries
        if e.ratio2 is not None
    ]
    points.sort(key=lambda p: (-p.y, p.keyword))
    return points


def tagcloud_data(counts: Mapping[str, float], top_n: int) -> list[TagCloudItem]:
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    top = [(k, c) for k, c in top_keywords(dict(counts), top_n) if c > 0]
    if not top:
        return []
    peak = top[0][1]
    return [TagCloudItem(k, c, c / peak) for k, c in top]


# -- row builders ---------------------------------------------------------


def daily_rows(days: Sequence[tuple[Any, int]]) -> list[dict]:
    return [{"date": d.isoformat(), "count": c} for d, c in days]


def article_rows(label: str, ranking: ArticleRanking) -> list[dict]:
    return [
        {"window_label": label, "key_type": "article", "key": rec.doi, "count": exact_count(c)}
        for rec, c in ranking.ranked
    ]


def keyword_rows(stats: WindowStats, top: int | None = None) -> list[dict]:
    ranked = top_keywords(stats.keyword_counts, len(stats.keyword_counts) if top is None else top)
    return [
        {"window_label": stats.window.label, "key_type": "keyword", "key": k, "count": exact_count(c)}
        for k, c in ranked
    ]


def trend_rows(entries: Iterable[TrendEntry]) -> list[dict]:
    return [
        {
            "keyword": e.keyword,
            "downloads": exact_count(e.downloads),
            "paper_count": e.paper_count,
            "ratio2": sig4(e.ratio2),
            "first_year": e.first_year,
            "is_new": e.is_new,
            "enough_downloads": e.enough_downloads,
            "high_ratio": e.high_ratio,
            "emerging": e.emerging,
        }
        for e in entries
    ]


def scatter_rows(points: Iterable[ScatterPoint]) -> list[dict]:
    return [
        {"keyword": p.keyword, "paper_count": p.x, "ratio2": sig4(p.y), "emerging": p.emerging}
        for p in points
    ]


def series_rows(keyword: str, series: Iterable[tuple[str, float]]) -> list[dict]:
    return [{"keyword": keyword, "window_label": lbl, "ratio1": sig4(r)} for lbl, r in series]


def tagcloud_rows(items: Iterable[TagCloudItem]) -> list[dict]:
    return [{"keyword": t.keyword, "count": exact_count(t.count), "size": sig4(t.size)} for t in items]


# -- serialization --------------------------------------------------------


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return np.format_float_positional(value, trim="-")
    return str(value)


def render_csv(rows: Sequence[Mapping], columns: Sequence[str], footer: Mapping[str, Any] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    for key, value in (footer or {}).items():
        buf.write(f"# {key}: {_cell(value)}\n")
    return buf.getvalue()


def render_json(rows: Sequence[Mapping], columns: Sequence[str], footer: Mapping[str, Any] | None = None) -> str:
    body: Any = [{c: row[c] for c in columns} for row in rows]
    if footer is not None:
        body = {"rows": body, **footer}
    return json.dumps(body, indent=2, ensure_ascii=False) + "\n"


def write_table(
    path: str | Path,
    rows: Sequence[Mapping],
    columns: Sequence[str],
    fmt: str = "csv",
    footer: Mapping[str, Any] | None = None,
) -> Path:
    """Write rows as ``path`` with the format's extension; return the final path."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    out = Path(path).with_suffix("." + fmt)
    text = render_csv(rows, columns, footer) if fmt == "csv" else render_json(rows, columns, footer)
    out.write_text(text, encoding="utf-8", newline="")
    return out


def read_table(path: str | Path) -> list[dict[str, str]]:
    """Read a CSV or JSON table back as rows of strings, ignoring footers."""
    p = Path(path)
    if p.suffix == ".json":
        data = json.loads(p.read_text(encoding="utf-8"))
        rows = data["rows"] if isinstance(data, dict) else data
        return [{k: _cell(v) for k, v in r.items()} for r in rows]
    lines = [ln for ln in p.read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
