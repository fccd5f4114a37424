"""Bibliographic corpus: loading, validation and the DOI / keyword indexes."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

from .keywords import EmptyKeyword, Normalizer, normalize, segment_title

COLUMNS = ("DOI", "TI", "AU", "PY", "DE", "ID", "SRC")
FIRST_INDEXED_YEAR = 1978

_DOI_PREFIXES = (
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi:",
)


class CorpusError(ValueError):
    """Base class for corpus loading errors."""


class DuplicateDoi(CorpusError):
    def __init__(self, doi: str, row: int, first_row: int):
        super().__init__(f"row {row}: DOI {doi!r} already defined on row {first_row}")
        self.doi = doi
        self.row = row


class MissingDoi(CorpusError):
    def __init__(self, row: int):
        super().__init__(f"row {row}: empty DOI")
        self.row = row


class MalformedRow(CorpusError):
    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row


class Source(enum.Enum):
    INDEXED = "wos"
    ONLINE_FIRST = "onlinefirst"


def normalize_doi(raw: str) -> str:
    doi = raw.strip()
    lowered = doi.lower()
    for prefix in _DOI_PREFIXES:
        if lowered.startswith(prefix):
            lowered = lowered[len(prefix) :]
            break
    return lowered.strip()


@dataclass(frozen=True)
class ArticleRecord:
    doi: str
    title: str
    authors: tuple[str, ...]
    year: int
    author_keywords: tuple[str, ...] = ()
    database_keywords: tuple[str, ...] = ()
    source: Source = Source.INDEXED

    @property
    def has_keywords(self) -> bool:
        return bool(self.author_keywords or self.database_keywords)


def resolve_keywords(
    record: ArticleRecord,
    normalizer: Normalizer,
    vocabulary: Iterable[str] = frozenset(),
) -> frozenset[str]:
    """Canonical keywords of a record.

    Author and database keywords are merged when either is present; the title
    is segmented (against ``vocabulary``) only when both are empty.
    """
    if record.has_keywords:
        out = set()
        for raw in record.author_keywords + record.database_keywords:
            try:
                out.add(normalize(raw, normalizer))
            except EmptyKeyword:
                continue
        return frozenset(out)
    return frozenset(segment_title(record.title, vocabulary, normalizer))


@dataclass(frozen=True, eq=False)
class KeywordMatrix:
    """CSR layout: keywords of record ``i`` are ``indices[indptr[i]:indptr[i+1]]``."""

    dois: list[str]
    doi_pos: dict[str, int]
    keywords: list[str]
    indptr: np.ndarray
    indices: np.ndarray


@dataclass(eq=False)
class Corpus:
    """DOI-keyed record store with a keyword inverted index.

    ``phrase_vocabulary`` holds the keywords coming from keyword fields; it is
    what title segmentation matched against at load time.
    """

    records: dict[str, ArticleRecord]
    normalizer: Normalizer
    keyword_index: dict[str, frozenset[str]] = field(default_factory=dict)
    vocabulary: dict[str, int] = field(default_factory=dict)
    phrase_vocabulary: frozenset[str] = frozenset()
    record_keywords: dict[str, frozenset[str]] = field(default_factory=dict)

    @classmethod
    def build(cls, records: Iterable[ArticleRecord], normalizer: Normalizer) -> "Corpus":
        by_doi: dict[str, ArticleRecord] = {}
        position: dict[str, int] = {}
        for i, rec in enumerate(records, 1):
            if rec.doi in by_doi:
                raise DuplicateDoi(rec.doi, i, position[rec.doi])
            by_doi[rec.doi] = rec
            position[rec.doi] = i

        record_keywords: dict[str, frozenset[str]] = {}
        phrases: set[str] = set()
        for doi, rec in by_doi.items():
            if rec.has_keywords:
                kws = resolve_keywords(rec, normalizer)
                record_keywords[doi] = kws
                phrases.update(kws)
        phrase_vocabulary = frozenset(phrases)
        for doi, rec in by_doi.items():
            if not rec.has_keywords:
                record_keywords[doi] = resolve_keywords(rec, normalizer, phrase_vocabulary)

        index: dict[str, set[str]] = {}
        first: dict[str, int] = {}
        for doi, kws in record_keywords.items():
            year = by_doi[doi].year
            for kw in kws:
                index.setdefault(kw, set()).add(doi)
                if kw not in first or year < first[kw]:
                    first[kw] = year
        return cls(
            records=by_doi,
            normalizer=normalizer,
            keyword_index={k: frozenset(v) for k, v in sorted(index.items())},
            vocabulary=dict(sorted(first.items())),
            phrase_vocabulary=phrase_vocabulary,
            record_keywords=record_keywords,
        )

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, doi: str) -> bool:
        return doi in self.records

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.records == other.records
            and self.keyword_index == other.keyword_index
            and self.vocabulary == other.vocabulary
        )

    @cached_property
    def matrix(self) -> "KeywordMatrix":
        """Integer-indexed record -> keyword incidence, built on first use."""
        dois = list(self.records)
        keywords = list(self.keyword_index)
        kw_pos = {k: i for i, k in enumerate(keywords)}
        indptr = [0]
        indices: list[int] = []
        for doi in dois:
            indices.extend(sorted(kw_pos[k] for k in self.keywords_of(doi)))
            indptr.append(len(indices))
        return KeywordMatrix(
            dois=dois,
            doi_pos={d: i for i, d in enumerate(dois)},
            keywords=keywords,
            indptr=np.array(indptr, dtype=np.int64),
            indices=np.array(indices, dtype=np.int64),
        )

    def get(self, doi: str) -> ArticleRecord | None:
        return self.records.get(doi)

    def keywords_of(self, doi: str) -> frozenset[str]:
        return self.record_keywords.get(doi, frozenset())

    def papers_with_keyword(self, k: str) -> int:
        return papers_with_keyword(self, k)

    def first_year(self, k: str) -> int | None:
        return first_year(self, k)


def papers_with_keyword(corpus: Corpus, k: str) -> int:
    return len(corpus.keyword_index.get(k, ()))


def first_year(corpus: Corpus, k: str) -> int | None:
    return corpus.vocabulary.get(k)


def _split_list(cell: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in cell.split(";") if part.strip())


def iter_records(source: IO[str] | Iterable[str]) -> Iterator[ArticleRecord]:
    """Parse the tab-separated bibliographic format, validating each row."""
    for _, rec in _iter_rows(source):
        yield rec


def _iter_rows(source: IO[str] | Iterable[str]) -> Iterator[tuple[int, ArticleRecord]]:
    # Row numbers count the header as row 1.
    reader = csv.reader(source, delimiter="\t", quoting=csv.QUOTE_NONE)
    try:
        header = next(reader)
    except StopIteration:
        return
    header = [h.strip().lstrip("\ufeff").upper() for h in header]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise MalformedRow(1, f"header lacks columns {', '.join(missing)}")
    pos = {c: header.index(c) for c in COLUMNS}

    for rownum, row in enumerate(reader, 2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise MalformedRow(rownum, f"expected {len(header)} columns, got {len(row)}")
        doi = normalize_doi(row[pos["DOI"]])
        if not doi:
            raise MissingDoi(rownum)
        try:
            year = int(row[pos["PY"]].strip())
        except ValueError:
            raise MalformedRow(rownum, f"unparseable year {row[pos['PY']]!r}") from None
        try:
            source = Source(row[pos["SRC"]].strip().lower())
        except ValueError:
            raise MalformedRow(rownum, f"unknown source {row[pos['SRC']]!r}") from None
        if source is Source.INDEXED and year < FIRST_INDEXED_YEAR:
            raise MalformedRow(rownum, f"indexed record year {year} precedes {FIRST_INDEXED_YEAR}")
        yield rownum, ArticleRecord(
            doi=doi,
            title=row[pos["TI"]].strip(),
            authors=_split_list(row[pos["AU"]]),
            year=year,
            author_keywords=_split_list(row[pos["DE"]]),
            database_keywords=_split_list(row[pos["ID"]]),
            source=source,
        )


def load_corpus(source: str | Path | IO[str] | Iterable[str], normalizer: Normalizer) -> Corpus:
    """Load and index a corpus from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return load_corpus(fh, normalizer)
    records: dict[str, ArticleRecord] = {}
    rows: dict[str, int] = {}
    for rownum, rec in _iter_rows(source):
        if rec.doi in records:
            raise DuplicateDoi(rec.doi, rownum, rows[rec.doi])
        records[rec.doi] = rec
        rows[rec.doi] = rownum
    return Corpus.build(records.values(), normalizer)


def dump_corpus(corpus: Corpus, dest: str | Path | IO[str]) -> None:
    """Write the corpus back in the bibliographic file format."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            dump_corpus(corpus, fh)
        return
    writer = csv.writer(dest, delimiter="\t", quoting=csv.QUOTE_NONE, lineterminator="\n")
    writer.writerow(COLUMNS)
    for rec in corpus.records.values():
        writer.writerow(
            [
                rec.doi,
                rec.title,
                "; ".join(rec.authors),
                rec.year,
                "; ".join(rec.author_keywords),
                "; ".join(rec.database_keywords),
                rec.source.value,
            ]
        )


def dumps_corpus(corpus: Corpus) -> str:
    buf = io.StringIO()
    dump_corpus(corpus, buf)
    return buf.getvalue()
