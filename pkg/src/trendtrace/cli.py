"""Command-line front end.

Settings resolve in three layers: built-in defaults, then a JSON config file
(``--config`` or ``$TRENDTRACE_CONFIG``), then command-line flags. Config
keys are the long option names with dashes replaced by underscores.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import date
from pathlib import Path
from typing import Any, Sequence

from . import report
from .aggregate import Window, build_window_stats, daily_counts, make_windows, span_window, top_articles
from .corpus import Corpus, CorpusError, Source, load_corpus
from .ingest import (
    LinkedEvent,
    LinkReport,
    MalformedEvent,
    Weights,
    link_events,
    merge_streams,
    parse_events,
    write_events,
)
from .keywords import Normalizer
from .simulate import EmptyCorpus, SimConfig, simulate_trace, write_trace
from .trends import TrendConfig, TrendError, detect_emerging, emerging_keywords, weekly_ratio_series

CONFIG_ENV = "TRENDTRACE_CONFIG"

DEFAULTS: dict[str, Any] = {
    "format": "csv",
    "out_dir": ".",
    "lenient_parse": False,
    "w_indexed": 1.0,
    "w_onlinefirst": 0.0,
    "weighted_articles": False,
    "raw_ratio1_denominator": False,
    "top": 20,
    "window_days": 7,
    "windows": 4,
    "min_downloads": 50.0,
    "min_ratio2": 20.0,
    "newness_years": 6,
    "reference_year": None,
    "top_k": 50,
    "seed": 0,
    "weekday_mean": 1000.0,
    "weekend_low": 400.0,
    "weekend_high": 800.0,
    "skew": 1.0,
}

# The month of recorded downloads; only `simulate` falls back to it.
SIM_RANGE = (date(2012, 3, 1), date(2012, 3, 31))

log = logging.getLogger("trendtrace")


class DataError(Exception):
    """Input data problem; exits with status 1."""


class UsageError(Exception):
    """Invalid option values; exits with status 2."""


def _date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a YYYY-MM-DD date: {text!r}") from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _data_options(p: argparse.ArgumentParser, events: bool = True) -> None:
    g = p.add_argument_group("data")
    g.add_argument("--corpus", help="tab-separated bibliographic file")
    g.add_argument("--synonyms", help="synonym file (alias => canonical)")
    g.add_argument("--stopwords", help="stopword file, one token per line")
    g.add_argument("--plural-exceptions", help="tokens never singularized, one per line")
    if events:
        g.add_argument("--events", action="append", help="event JSON Lines file (repeatable)")
        g.add_argument("--lenient-parse", action="store_true", default=None, help="skip malformed event lines")
        g.add_argument("--w-indexed", type=float, help="weight of indexed records (default 1)")
        g.add_argument("--w-onlinefirst", type=float, help="weight of Online First records (default 0)")


def _output_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("output")
    g.add_argument("--out-dir", help="directory for report files (default: current)")
    g.add_argument("--format", choices=report.FORMATS, help="report format (default csv)")


def _range_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--from", dest="from_", metavar="DATE", type=_date, help="first UTC day")
    p.add_argument("--to", metavar="DATE", type=_date, help="last UTC day")


def _window_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window-start", type=_date, help="first day of window 1")
    p.add_argument("--window-days", type=_positive_int, help="window length in days (default 7)")
    p.add_argument("--windows", type=_positive_int, help="number of windows (default 4)")


def _trend_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("trend criteria")
    g.add_argument("--min-downloads", type=float, help="minimum weighted downloads (default 50)")
    g.add_argument("--min-ratio2", type=float, help="downloads per paper must exceed this (default 20)")
    g.add_argument("--newness-years", type=_positive_int, help="newness window in years (default 6)")
    g.add_argument("--reference-year", type=int, help="year newness is measured from (default: end of range)")
    g.add_argument("--top-k", type=_positive_int, help="candidate keywords (default 50)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trendtrace", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help=f"JSON config file (default ${CONFIG_ENV})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = sub.add_parser("corpus", help="corpus checks")
    corpus_sub = corpus.add_subparsers(dest="action", required=True)
    validate = corpus_sub.add_parser("validate", help="load the corpus and print a summary")
    _data_options(validate, events=False)

    ingest = sub.add_parser("ingest", help="parse, merge and link event files")
    _data_options(ingest)
    _output_options(ingest)

    sim = sub.add_parser("simulate", help="generate a synthetic download trace")
    _data_options(sim, events=False)
    _range_options(sim)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--weekday-mean", type=float)
    sim.add_argument("--weekend-low", type=float)
    sim.add_argument("--weekend-high", type=float)
    sim.add_argument("--skew", type=float, help="Zipf exponent of article popularity")
    sim.add_argument("--out", required=True, help="trace path (JSON Lines)")

    stats = sub.add_parser("stats", help="download statistics")
    stats_sub = stats.add_subparsers(dest="action", required=True)
    daily = stats_sub.add_parser("daily", help="raw downloads per day")
    top_art = stats_sub.add_parser("top-articles", help="most downloaded articles")
    top_kw = stats_sub.add_parser("top-keywords", help="most downloaded keywords per window")
    for p in (daily, top_art, top_kw):
        _data_options(p)
        _output_options(p)
    _range_options(daily)
    _range_options(top_art)
    top_art.add_argument("--top", type=_positive_int)
    top_art.add_argument("--weighted-articles", action="store_true", default=None)
    _window_options(top_kw)
    top_kw.add_argument("--top", type=_positive_int)

    trends = sub.add_parser("trends", help="detect emerging keywords")
    _data_options(trends)
    _output_options(trends)
    _range_options(trends)
    _trend_options(trends)

    rep = sub.add_parser("report", help="figure data")
    rep_sub = rep.add_subparsers(dest="action", required=True)
    scatter = rep_sub.add_parser("scatter", help="papers vs downloads-per-paper")
    tagcloud = rep_sub.add_parser("tagcloud", help="keyword tag-cloud sizes")
    series = rep_sub.add_parser("series", help="weekly keyword download share")
    for p in (scatter, tagcloud, series):
        _data_options(p)
        _output_options(p)
    _range_options(scatter)
    _trend_options(scatter)
    _range_options(tagcloud)
    tagcloud.add_argument("--top", type=_positive_int)
    _window_options(series)
    series.add_argument("--keyword", action="append", required=True, help="keyword (repeatable)")
    series.add_argument("--raw-ratio1-denominator", action="store_true", default=None)
    return parser


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from DEFAULTS."""
    config_path = args.config or os.environ.get(CONFIG_ENV)
    config: dict[str, Any] = {}
    if config_path:
        try:
            config = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DataError(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"config file {config_path}: {exc}") from None
        if not isinstance(config, dict):
            raise DataError(f"config file {config_path}: expected a JSON object")
    for key, value in vars(args).copy().items():
        if value is not None:
            continue
        name = "from" if key == "from_" else key
        if name in config:
            value = config[name]
        elif name in DEFAULTS:
            value = DEFAULTS[name]
        else:
            continue
        if key in ("from_", "to", "window_start") and isinstance(value, str):
            value = date.fromisoformat(value)
        setattr(args, key, value)
    return args


# -- pipeline helpers -----------------------------------------------------


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if not getattr(args, name, None):
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _check_path(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"{what} not found: {path}")
    return p


def load_normalizer(args: argparse.Namespace) -> Normalizer:
    paths = {}
    for key in ("synonyms", "stopwords", "plural_exceptions"):
        value = getattr(args, key, None)
        paths[key] = _check_path(value, f"{key.replace('_', ' ')} file") if value else None
    try:
        return Normalizer.from_files(**paths)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def load_inputs(args: argparse.Namespace) -> Corpus:
    _require(args, "corpus")
    path = _check_path(args.corpus, "corpus file")
    normalizer = load_normalizer(args)
    try:
        corpus = load_corpus(path, normalizer)
    except CorpusError as exc:
        raise DataError(f"{path}: {exc}") from None
    log.info("loaded %d records, %d keywords", len(corpus), len(corpus.keyword_index))
    return corpus


def load_linked(args: argparse.Namespace, corpus: Corpus) -> tuple[list[LinkedEvent], LinkReport]:
    _require(args, "events")
    streams = []
    for p in args.events:
        path = _check_path(p, "event file")
        try:
            streams.append(parse_events(path, lenient=args.lenient_parse))
        except MalformedEvent as exc:
            raise DataError(f"{path}: {exc}") from None
    try:
        weights = Weights(args.w_indexed, args.w_onlinefirst)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    linked, link_report = link_events(merge_streams(*streams), corpus, weights)
    log.info("linked events: %s", link_report.as_dict())
    return linked, link_report


def _range(args: argparse.Namespace, linked: list[LinkedEvent], label: str = "all") -> Window:
    start, end = getattr(args, "from_", None), getattr(args, "to", None)
    if start is None or end is None:
        if not linked:
            raise DataError("no events to derive a date range from; pass --from and --to")
        span = span_window(linked)
        start = start or span.start
        end = end or span.end
    try:
        return Window(start, end, label)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _windows(args: argparse.Namespace, linked: list[LinkedEvent]) -> list[Window]:
    start = args.window_start
    if start is None:
        if not linked:
            raise DataError("no events; pass --window-start")
        start = span_window(linked).start
    return make_windows(start, args.window_days, args.windows)


def _out(args: argparse.Namespace, name: str) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def _trend_config(args: argparse.Namespace) -> TrendConfig:
    try:
        return TrendConfig(
            min_downloads=args.min_downloads,
            min_ratio2=args.min_ratio2,
            newness_window_years=args.newness_years,
            reference_year=args.reference_year,
            top_k=args.top_k,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- commands -------------------------------------------------------------


def cmd_corpus_validate(args: argparse.Namespace) -> int:
    corpus = load_inputs(args)
    n_online = sum(1 for r in corpus.records.values() if r.source is Source.ONLINE_FIRST)
    n_segmented = sum(1 for r in corpus.records.values() if not r.has_keywords)
    print(f"records\t{len(corpus)}")
    print(f"indexed\t{len(corpus) - n_online}")
    print(f"onlinefirst\t{n_online}")
    print(f"title_segmented\t{n_segmented}")
    print(f"keywords\t{len(corpus.keyword_index)}")
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    corpus = load_inputs(args)
    linked, link_report = load_linked(args, corpus)
    write_events((ev.event for ev in linked), _out(args, "events.jsonl"))
    rows = [{"category": k, "count": v} for k, v in link_report.as_dict().items()]
    report.write_table(_out(args, "link_report"), rows, ("category", "count"), args.format)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    corpus = load_inputs(args)
    try:
        cfg = SimConfig(
            seed=args.seed,
            start_date=args.from_ or SIM_RANGE[0],
            end_date=args.to or SIM_RANGE[1],
            corpus=corpus,
            weekday_mean=args.weekday_mean,
            weekend_low=args.weekend_low,
            weekend_high=args.weekend_high,
            popularity_skew=args.skew,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        events = simulate_trace(cfg)
    except EmptyCorpus as exc:
        raise DataError(str(exc)) from None
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_trace(events, out, cfg)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    corpus = load_inputs(args)
    linked, _ = load_linked(args, corpus)
    if args.action == "daily":
        window = _range(args, linked)
        rows = report.daily_rows(daily_counts(linked, window))
        report.write_table(_out(args, "daily"), rows, report.DAILY_COLUMNS, args.format)
    elif args.action == "top-articles":
        window = _range(args, linked)
        stats = build_window_stats(linked, corpus, window)
        ranking = top_articles(stats, corpus, args.top, weighted=args.weighted_articles)
        report.write_table(
            _out(args, "top_articles"), report.article_rows(window.label, ranking), report.STATS_COLUMNS, args.format
        )
        unmatched = [
            {"window_label": window.label, "key_type": "article", "key": doi, "count": report.exact_count(c)}
            for doi, c in ranking.unmatched
        ]
        report.write_table(_out(args, "unmatched_articles"), unmatched, report.STATS_COLUMNS, args.format)
    else:
        rows = []
        for w in _windows(args, linked):
            rows.extend(report.keyword_rows(build_window_stats(linked, corpus, w), args.top))
        report.write_table(_out(args, "top_keywords"), rows, report.STATS_COLUMNS, args.format)
    return 0


def _entries(args: argparse.Namespace):
    corpus = load_inputs(args)
    linked, _ = load_linked(args, corpus)
    cfg = _trend_config(args)
    stats = build_window_stats(linked, corpus, _range(args, linked))
    return detect_emerging(stats, corpus, cfg)


def _write_scatter(args: argparse.Namespace, entries) -> None:
    points = report.scatter_data(entries)
    report.write_table(
        _out(args, "scatter"),
        report.scatter_rows(points),
        report.SCATTER_COLUMNS,
        args.format,
        footer={"skipped": len(entries) - len(points)},
    )


def cmd_trends(args: argparse.Namespace) -> int:
    entries = _entries(args)
    report.write_table(_out(args, "trends"), report.trend_rows(entries), report.TREND_COLUMNS, args.format)
    _write_scatter(args, entries)
    for kw in emerging_keywords(entries):
        print(kw)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    if args.action == "scatter":
        _write_scatter(args, _entries(args))
        return 0
    corpus = load_inputs(args)
    linked, _ = load_linked(args, corpus)
    if args.action == "tagcloud":
        stats = build_window_stats(linked, corpus, _range(args, linked))
        items = report.tagcloud_data(stats.keyword_counts, args.top)
        report.write_table(_out(args, "tagcloud"), report.tagcloud_rows(items), report.TAGCLOUD_COLUMNS, args.format)
        return 0
    windows = _windows(args, linked)
    per_window = [build_window_stats(linked, corpus, w) for w in windows]
    rows = []
    for kw in args.keyword:
        try:
            keyword = corpus.normalizer.normalize(kw)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        try:
            series = weekly_ratio_series(keyword, windows, per_window, args.raw_ratio1_denominator)
        except TrendError as exc:
            raise DataError(str(exc)) from None
        rows.extend(report.series_rows(keyword, series))
    report.write_table(_out(args, "series"), rows, report.SERIES_COLUMNS, args.format)
    return 0


COMMANDS = {
    "corpus": cmd_corpus_validate,
    "ingest": cmd_ingest,
    "simulate": cmd_simulate,
    "stats": cmd_stats,
    "trends": cmd_trends,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        resolve(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"trendtrace: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"trendtrace: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
