from __future__ import annotations

import random
from datetime import date, datetime, time, timedelta, timezone
from pathlib import Path

import pytest

from trendtrace.corpus import COLUMNS, ArticleRecord, Corpus, Source, load_corpus
from trendtrace.ingest import DownloadEvent
from trendtrace.keywords import Normalizer, default_normalizer

DATA = Path(__file__).parent / "data"

KEYWORD_POOL = [
    "citation", "Citations", "h-index", "h index", "bibliometrics", "science",
    "indicator", "Indicators", "journal", "impact factor", "Impact Factors",
    "patent", "Patents", "collaboration", "co-authorship", "triple helix",
    "university", "Universities", "ranking", "network", "twitter", "g-index",
    "open access", "webometrics", "citation analysis", "peer review",
]
TITLE_POOL = [
    "citation", "network", "analysis", "of", "the", "patent", "science",
    "mapping", "university", "ranking", "journals", "impact", "factor",
    "open", "access", "triple", "helix", "and", "in", "collaboration",
]


def tsv(rows: list[tuple]) -> str:
    lines = ["\t".join(COLUMNS)]
    lines += ["\t".join(str(c) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


def random_corpus_rows(seed: int, n: int) -> list[tuple]:
    """Corpus rows with mixed keyword fields, title-only records and Online First items."""
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        doi = f"10.1007/S11192-SYN-{seed}-{i:04d}"
        title = " ".join(rng.choice(TITLE_POOL) for _ in range(rng.randint(3, 9)))
        authors = "; ".join(f"Author{rng.randint(1, 40)}" for _ in range(rng.randint(1, 3)))
        year = rng.randint(1978, 2012)
        mode = rng.random()
        if mode < 0.2:
            de, id_ = "", ""
        else:
            de = "; ".join(rng.sample(KEYWORD_POOL, rng.randint(0, 3)))
            id_ = "; ".join(rng.sample(KEYWORD_POOL, rng.randint(1, 3)))
        src = "onlinefirst" if rng.random() < 0.15 else "wos"
        rows.append((doi, title, authors, year, de, id_, src))
    return rows


def day_events(doi: str, n: int, day: date, start_second: int = 0) -> list[DownloadEvent]:
    midnight = datetime.combine(day, time(), tzinfo=timezone.utc)
    return [
        DownloadEvent(ts=midnight + timedelta(seconds=(start_second + i) % 86400), doi=doi)
        for i in range(n)
    ]


def random_events(corpus: Corpus, seed: int, n: int, start: date, days: int, unmatched: float = 0.05) -> list[DownloadEvent]:
    rng = random.Random(seed)
    dois = sorted(corpus.records)
    events = []
    for _ in range(n):
        doi = f"10.9999/unknown-{rng.randint(0, 30)}" if rng.random() < unmatched else rng.choice(dois)
        ts = datetime.combine(start, time(), tzinfo=timezone.utc) + timedelta(
            seconds=rng.randrange(days * 86400)
        )
        events.append(DownloadEvent(ts=ts, doi=doi))
    return events


@pytest.fixture(scope="session")
def normalizer() -> Normalizer:
    return default_normalizer()


@pytest.fixture(scope="session")
def corpus10_path() -> Path:
    return DATA / "corpus10.tsv"


@pytest.fixture(scope="session")
def corpus10(corpus10_path, normalizer) -> Corpus:
    return load_corpus(corpus10_path, normalizer)


@pytest.fixture(scope="session")
def corpus50(tmp_path_factory, normalizer) -> Corpus:
    path = tmp_path_factory.mktemp("corpus") / "corpus50.tsv"
    path.write_text(tsv(random_corpus_rows(50, 50)), encoding="utf-8")
    return load_corpus(path, normalizer)


def trend_fixture_rows() -> list[tuple]:
    """twitter on 3 recent papers; citation on 433 papers going back decades."""
    rows = [
        (f"10.1007/tw-{i}", f"Tweets and scholarship {i}", "Priem, J", 2010 + i, "twitter", "", "wos")
        for i in range(3)
    ]
    rows += [
        (f"10.1007/cit-{i:03d}", f"On counting references {i}", "Garfield, E", 1978 + i % 34, "citation", "", "wos")
        for i in range(433)
    ]
    return rows


def trend_fixture_events() -> list[DownloadEvent]:
    """123 twitter downloads and 4214 citation downloads over March 2012."""
    events = []
    tw = [41, 41, 41]
    for i, n in enumerate(tw):
        events += day_events(f"10.1007/tw-{i}", n, date(2012, 3, 1 + i))
    # 4214 = 433 * 9 + 317
    for i in range(433):
        n = 9 + (1 if i < 317 else 0)
        events += day_events(f"10.1007/cit-{i:03d}", n, date(2012, 3, 1 + i % 28), start_second=i * 10)
    return events


@pytest.fixture(scope="session")
def trend_corpus(normalizer) -> Corpus:
    return load_corpus(tsv(trend_fixture_rows()).splitlines(keepends=True), normalizer)


# -- acceptance summary -------------------------------------------------------

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items(), key=lambda kv: _criterion_key(kv[0])):
        terminalreporter.write_line(f"{outcome}  {name}")


def _criterion_key(name: str) -> tuple[int, str]:
    parts = name.split("_")
    try:
        return int(parts[2]), name
    except (IndexError, ValueError):
        return 999, name
