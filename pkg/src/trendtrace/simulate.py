"""Seeded synthetic download traces.

Weekdays draw a Poisson daily count, weekend days a uniform integer count.
Each event picks an article by Zipf rank over a seeded permutation of the
corpus DOIs and a uniformly random second of its day.

Randomness comes from SplitMix64 only. The root generator is seeded with
``seed``; the first split drives the DOI permutation and each following
split drives one day, in date order. Samplers:

* uniform integer in ``[lo, hi]``: rejection on the raw 64-bit output
  (reject ``x >= 2**64 - 2**64 % span``), value ``lo + x % span``;
* uniform double: ``(x >> 11) * 2**-53``;
* Poisson(mean): ``ceil(mean / 32)`` equal chunks, each drawn by Knuth's
  product-of-uniforms method, summed;
* Zipf rank: first index whose cumulative weight exceeds ``u * total``,
  with weights ``1 / rank**skew``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone
from pathlib import Path

import numpy as np

from . import _kernels
from .corpus import Corpus
from .ingest import DownloadEvent, write_events

MASK64 = 0xFFFFFFFFFFFFFFFF
GENERATOR = "splitmix64"


class EmptyCorpus(ValueError):
    pass


class SplitMix64:
    """SplitMix64 generator; ``split`` seeds a child from the next output."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state, x = _kernels.splitmix64(self.state)
        return x

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next())

    def uniform_int(self, lo: int, hi: int) -> int:
        value, self.state = _kernels.uniform_int(self.state, lo, hi)
        return value


@dataclass(frozen=True)
class SimConfig:
    seed: int
    start_date: date
    end_date: date
    corpus: Corpus = field(repr=False, compare=False)
    weekday_mean: float = 1000.0
    weekend_low: float = 400.0
    weekend_high: float = 800.0
    popularity_skew: float = 1.0

    def __post_init__(self) -> None:
        if self.end_date < self.start_date:
            raise ValueError("end_date precedes start_date")
        if self.weekday_mean <= 0:
            raise ValueError("weekday_mean must be positive")
        if not 0 < self.weekend_low <= self.weekend_high:
            raise ValueError("need 0 < weekend_low <= weekend_high")
        if math.ceil(self.weekend_low) > math.floor(self.weekend_high):
            raise ValueError("weekend range contains no integer")
        if self.popularity_skew <= 0:
            raise ValueError("popularity_skew must be positive")

    def metadata(self) -> dict:
        dois = sorted(self.corpus.records)
        return {
            "generator": GENERATOR,
            "seed": self.seed,
            "start_date": self.start_date.isoformat(),
            "end_date": self.end_date.isoformat(),
            "weekday_mean": self.weekday_mean,
            "weekend_low": self.weekend_low,
            "weekend_high": self.weekend_high,
            "popularity_skew": self.popularity_skew,
            "corpus": {
                "records": len(dois),
                "doi_sha256": hashlib.sha256("\n".join(dois).encode("utf-8")).hexdigest(),
            },
        }


def popularity_order(dois: list[str], rng: SplitMix64) -> list[str]:
    """Fisher-Yates shuffle of the sorted DOIs; index 0 is the most popular."""
    order = sorted(dois)
    for i in range(len(order) - 1, 0, -1):
        j = rng.uniform_int(0, i)
        order[i], order[j] = order[j], order[i]
    return order


def zipf_cumulative(n: int, skew: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    return np.cumsum(ranks ** -skew)


def daily_total(rng: SplitMix64, day: date, cfg: SimConfig) -> int:
    if day.weekday() >= 5:
        return rng.uniform_int(math.ceil(cfg.weekend_low), math.floor(cfg.weekend_high))
    value, rng.state = _kernels.poisson(rng.state, cfg.weekday_mean)
    return value


def simulate_trace(cfg: SimConfig) -> list[DownloadEvent]:
    """Generate the trace described by ``cfg``, sorted by timestamp."""
    if len(cfg.corpus) == 0:
        raise EmptyCorpus("cannot simulate downloads over an empty corpus")
    root = SplitMix64(cfg.seed)
    order = popularity_order(list(cfg.corpus.records), root.split())
    cum = zipf_cumulative(len(order), cfg.popularity_skew)
    records = [cfg.corpus.records[d] for d in order]

    events: list[DownloadEvent] = []
    day = cfg.start_date
    while day <= cfg.end_date:
        rng = root.split()
        n = daily_total(rng, day, cfg)
        seconds, ranks, rng.state = _kernels.place_events(rng.state, n, cum)
        midnight = datetime.combine(day, time(), tzinfo=timezone.utc)
        for i in np.argsort(seconds, kind="stable"):
            rec = records[ranks[i]]
            events.append(
                DownloadEvent(
                    ts=midnight + timedelta(seconds=int(seconds[i])),
                    doi=rec.doi,
                    title=rec.title,
                    authors=rec.authors,
                )
            )
        day += timedelta(days=1)
    return events


def metadata_path(trace_path: str | Path) -> Path:
    p = Path(trace_path)
    return p.with_name(p.name + ".meta.json")


def write_trace(events: list[DownloadEvent], path: str | Path, cfg: SimConfig) -> Path:
    """Write the trace as JSON Lines plus a ``.meta.json`` sidecar; return the sidecar path."""
    write_events(events, path)
    meta = cfg.metadata()
    meta["events"] = len(events)
    side = metadata_path(path)
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return side
