"""Time the compiled kernels against the pure-Python fallback.

Runs the simulator and the keyword aggregation on a synthetic corpus under
each available backend and prints the best of several repeats.

    python benchmarks/bench_kernels.py --records 500 --days 31 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np
from datetime import date, timedelta

from trendtrace import _kernels
from trendtrace.aggregate import Window, build_window_stats
from trendtrace.corpus import ArticleRecord, Corpus, Source
from trendtrace.ingest import link_events
from trendtrace.keywords import default_normalizer
from trendtrace.simulate import SimConfig, simulate_trace

TERMS = ["citation", "h-index", "bibliometrics", "twitter", "patent", "journal", "ranking",
         "collaboration", "co-word analysis", "impact factor", "innovation", "technology"]


def synthetic_corpus(n: int) -> Corpus:
    records = []
    for i in range(n):
        kws = tuple(TERMS[(i * k) % len(TERMS)] for k in (1, 3, 7))
        records.append(
            ArticleRecord(
                doi=f"10.1007/bench-{i:05d}",
                title=f"Article {i}",
                authors=(),
                year=1980 + i % 33,
                author_keywords=kws,
                source=Source.INDEXED if i % 10 else Source.ONLINE_FIRST,
            )
        )
    return Corpus.build(records, default_normalizer())


def best_of(repeat: int, fn) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--records", type=int, default=500)
    ap.add_argument("--days", type=int, default=31)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    corpus = synthetic_corpus(args.records)
    start = date(2012, 3, 1)
    cfg = SimConfig(1, start, start + timedelta(days=args.days - 1), corpus)
    trace = simulate_trace(cfg)
    linked, _ = link_events(trace, corpus)
    window = Window(cfg.start_date, cfg.end_date)
    print(f"{len(corpus)} records, {len(trace)} events over {args.days} days")

    # Raw kernel inputs: one million events, independent of object overhead.
    n_events = 1_000_000
    cum = np.cumsum(np.arange(1, len(corpus) + 1, dtype=np.float64) ** -1.0)
    m = corpus.matrix
    rng = np.random.default_rng(0)
    rec = rng.integers(0, len(corpus), n_events).astype(np.int64)
    w = np.ones(n_events)

    results: dict[str, dict[str, float]] = {}
    for name in _kernels.available_backends():
        k = _kernels.load_backend(name)
        with _kernels.use_backend(name):
            results[name] = {
                "simulate": best_of(args.repeat, lambda: simulate_trace(cfg)),
                "aggregate": best_of(args.repeat, lambda: build_window_stats(linked, corpus, window)),
                "place_1m": best_of(args.repeat, lambda: k.place_events(7, n_events, cum)),
                "accum_1m": best_of(
                    args.repeat, lambda: k.accumulate_keywords(rec, w, m.indptr, m.indices, len(m.keywords))
                ),
            }

    print(f"{'stage':<10}" + "".join(f"{n:>12}" for n in results) + ("     speedup" if len(results) > 1 else ""))
    for stage in ("simulate", "aggregate", "place_1m", "accum_1m"):
        row = f"{stage:<10}" + "".join(f"{results[n][stage]:>11.4f}s" for n in results)
        if "cython" in results:
            row += f"{results['python'][stage] / results['cython'][stage]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
