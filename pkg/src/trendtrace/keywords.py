"""Keyword normalization and title segmentation.

A raw keyword goes through a fixed pipeline: trim, collapse internal
whitespace, lowercase, singularize the final token, then one synonym-table
lookup. The output of :func:`normalize` is always a fixed point of
:func:`normalize`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

MAX_PHRASE_TOKENS = 4

# Anything other than word characters, whitespace and hyphens splits tokens.
_PUNCT = re.compile(r"[^\w\s-]+|_")

# "-ses" only loses "es" after a double s ("classes"); "cases" -> "case".
_ES_SUFFIXES = ("xes", "zes", "ches", "shes", "sses")


class EmptyKeyword(ValueError):
    """Raised when a keyword is empty after trimming."""


def singularize(token: str, exceptions: frozenset[str] | Iterable[str] = frozenset()) -> str:
    """Map a regular English plural to its singular form.

    Every rule's output matches no rule again, so the function is idempotent.
    A token is never shortened to the empty string.
    """
    if token in exceptions:
        return token
    if token.endswith("ies") and len(token) > 3:
        return token[:-3] + "y"
    for suffix in _ES_SUFFIXES:
        if token.endswith(suffix) and len(token) > len(suffix):
            return token[:-2]
    if token.endswith("s") and not token.endswith("ss") and len(token) > 1:
        return token[:-1]
    return token


def _prenormalize(raw: str, exceptions: frozenset[str]) -> str:
    tokens = raw.split()
    if not tokens:
        return ""
    tokens = [t.lower() for t in tokens]
    tokens[-1] = singularize(tokens[-1], exceptions)
    return " ".join(tokens)


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Immutable keyword normalizer.

    Synonym keys are pre-normalized on construction, so an alias written as
    ``"H Indexes"`` matches input ``"h index"``. Values must already be
    canonical: a value that would be rewritten again (by plural folding or by
    another table entry) is rejected, because the table is applied once.
    """

    synonym_table: Mapping[str, str] = field(default_factory=dict)
    stopwords: frozenset[str] = frozenset()
    plural_exceptions: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        exceptions = frozenset(t.lower() for t in self.plural_exceptions)
        stopwords = frozenset(w.lower() for w in self.stopwords)
        for w in stopwords:
            if not w or any(c.isspace() for c in w):
                raise ValueError(f"stopword {w!r} must be a single non-empty token")
        table: dict[str, str] = {}
        for alias, canonical in self.synonym_table.items():
            key = _prenormalize(alias, exceptions)
            value = _prenormalize(canonical, exceptions)
            if not key or not value:
                raise ValueError(f"empty synonym entry: {alias!r} => {canonical!r}")
            if value != " ".join(canonical.split()).lower():
                raise ValueError(
                    f"synonym target {canonical!r} is not canonical (normalizes to {value!r})"
                )
            if key in table and table[key] != value:
                raise ValueError(f"conflicting synonym entries for {key!r}")
            table[key] = value
        for key, value in table.items():
            if table.get(value, value) != value:
                raise ValueError(f"synonym chain: {key!r} => {value!r} => {table[value]!r}")
        object.__setattr__(self, "synonym_table", MappingProxyType(table))
        object.__setattr__(self, "stopwords", stopwords)
        object.__setattr__(self, "plural_exceptions", exceptions)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Normalizer):
            return NotImplemented
        return (
            dict(self.synonym_table) == dict(other.synonym_table)
            and self.stopwords == other.stopwords
            and self.plural_exceptions == other.plural_exceptions
        )

    def __hash__(self) -> int:
        return hash(
            (frozenset(self.synonym_table.items()), self.stopwords, self.plural_exceptions)
        )

    def normalize(self, raw: str) -> str:
        return normalize(raw, self)

    @classmethod
    def from_files(
        cls,
        synonyms: str | Path | None = None,
        stopwords: str | Path | None = None,
        plural_exceptions: str | Path | None = None,
    ) -> "Normalizer":
        """Build a normalizer from text files; a missing path uses the bundled seed."""
        return cls(
            synonym_table=parse_synonyms(_read(synonyms, "synonyms.txt")),
            stopwords=frozenset(parse_wordlist(_read(stopwords, "stopwords.txt"))),
            plural_exceptions=frozenset(
                parse_wordlist(_read(plural_exceptions, "plural_exceptions.txt"))
            ),
        )


def default_normalizer() -> Normalizer:
    """Normalizer built from the bundled seed files."""
    return Normalizer.from_files()


def _read(path: str | Path | None, seed_name: str) -> str:
    if path is None:
        return resources.files("trendtrace.data").joinpath(seed_name).read_text("utf-8")
    return Path(path).read_text(encoding="utf-8")


def parse_synonyms(text: str) -> dict[str, str]:
    """Parse ``alias => canonical`` lines; ``#`` starts a comment."""
    table: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        alias, sep, canonical = line.partition("=>")
        if not sep or not alias.strip() or not canonical.strip():
            raise ValueError(f"synonym line {lineno}: expected 'alias => canonical'")
        table[alias.strip()] = canonical.strip()
    return table


def parse_wordlist(text: str) -> list[str]:
    words = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.append(line.lower())
    return words


def normalize(raw: str, n: Normalizer) -> str:
    """Return the canonical form of a raw keyword.

    >>> normalize("Citations ", Normalizer())
    'citation'
    >>> normalize("Impact  Factor", Normalizer())
    'impact factor'
    """
    text = _prenormalize(raw, n.plural_exceptions)
    if not text:
        raise EmptyKeyword(f"keyword {raw!r} is empty after trimming")
    return n.synonym_table.get(text, text)


def tokenize_title(title: str) -> list[str]:
    """Lowercase a title and split it into tokens.

    Punctuation becomes a separator; hyphens stay inside tokens but are
    stripped from token edges.
    """
    tokens = []
    for tok in _PUNCT.sub(" ", title.lower()).split():
        tok = tok.strip("-")
        if tok:
            tokens.append(tok)
    return tokens


def segment_title(title: str, corpus_vocabulary: Iterable[str] | set[str], n: Normalizer) -> set[str]:
    """Derive keywords from a title.

    Known multi-word keywords (2 to 4 tokens) are matched greedily, longest
    first, scanning left to right. Tokens not covered by a phrase are emitted
    as single keywords unless they are stopwords.
    """
    vocab = corpus_vocabulary if isinstance(corpus_vocabulary, (set, frozenset)) else set(corpus_vocabulary)
    tokens = tokenize_title(title)
    found: set[str] = set()
    leftovers: list[str] = []
    i = 0
    while i < len(tokens):
        for size in range(min(MAX_PHRASE_TOKENS, len(tokens) - i), 1, -1):
            phrase = normalize(" ".join(tokens[i : i + size]), n)
            if phrase in vocab:
                found.add(phrase)
                i += size
                break
        else:
            leftovers.append(tokens[i])
            i += 1
    for tok in leftovers:
        if tok in n.stopwords:
            continue
        kw = normalize(tok, n)
        if kw not in n.stopwords:
            found.add(kw)
    return found
