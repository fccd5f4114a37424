import json
import math
from collections import Counter
from datetime import date

import numpy as np
import pytest

from trendtrace import _kernels
from trendtrace.aggregate import Window, daily_counts
from trendtrace.corpus import Corpus
from trendtrace.ingest import event_to_json, parse_events
from trendtrace.simulate import (
    EmptyCorpus,
    SimConfig,
    SplitMix64,
    popularity_order,
    simulate_trace,
    write_trace,
    zipf_cumulative,
)

MARCH_START, MARCH_END = date(2012, 3, 1), date(2012, 3, 31)


def cfg_for(corpus, seed=42, start=MARCH_START, end=MARCH_END, **kw):
    return SimConfig(seed=seed, start_date=start, end_date=end, corpus=corpus, **kw)


def test_config_validation(corpus10):
    with pytest.raises(ValueError):
        cfg_for(corpus10, weekday_mean=0)
    with pytest.raises(ValueError):
        cfg_for(corpus10, weekend_low=800, weekend_high=400)
    with pytest.raises(ValueError):
        cfg_for(corpus10, weekend_low=400.2, weekend_high=400.7)
    with pytest.raises(ValueError):
        cfg_for(corpus10, start=MARCH_END, end=MARCH_START)


def test_empty_corpus(normalizer):
    with pytest.raises(EmptyCorpus):
        simulate_trace(cfg_for(Corpus.build([], normalizer)))


def test_deterministic_bytes(corpus10):
    a = simulate_trace(cfg_for(corpus10, end=date(2012, 3, 5)))
    b = simulate_trace(cfg_for(corpus10, end=date(2012, 3, 5)))
    assert [event_to_json(e) for e in a] == [event_to_json(e) for e in b]
    c = simulate_trace(cfg_for(corpus10, seed=43, end=date(2012, 3, 5)))
    assert [event_to_json(e) for e in a] != [event_to_json(e) for e in c]


def test_degenerate_weekend(corpus10):
    evs = simulate_trace(cfg_for(corpus10, weekend_low=500, weekend_high=500))
    counts = dict(daily_counts(evs, Window(MARCH_START, MARCH_END)))
    weekend = [d for d in counts if d.weekday() >= 5]
    assert len(weekend) == 9
    assert all(counts[d] == 500 for d in weekend)


def test_sorted_dois_in_corpus_and_days(corpus10):
    evs = simulate_trace(cfg_for(corpus10, start=date(2012, 3, 10), end=date(2012, 3, 10)))
    assert evs
    assert all(e.ts.date() == date(2012, 3, 10) for e in evs)
    assert all(e.doi in corpus10.records for e in evs)
    assert [e.ts for e in evs] == sorted(e.ts for e in evs)
    assert evs[0].title == corpus10.records[evs[0].doi].title


def test_weekday_means_per_seed(corpus10):
    # Poisson(1000) daily counts: sample mean of n weekdays has SE sqrt(1000 / n).
    for seed in range(20):
        evs = simulate_trace(cfg_for(corpus10, seed=seed))
        days = daily_counts(evs, Window(MARCH_START, MARCH_END))
        weekday = [c for d, c in days if d.weekday() < 5]
        weekend = [c for d, c in days if d.weekday() >= 5]
        assert len(weekday) == 22
        se = math.sqrt(1000 / len(weekday))
        assert abs(np.mean(weekday) - 1000) < 3 * se, seed
        assert all(400 <= c <= 800 for c in weekend)


def test_zipf_popularity_is_skewed(corpus50):
    evs = simulate_trace(cfg_for(corpus50, seed=5, end=date(2012, 3, 14)))
    counts = Counter(e.doi for e in evs)
    order = popularity_order(list(corpus50.records), SplitMix64(5).split())
    top, tenth = counts[order[0]], counts[order[9]]
    # Expected ratio for skew 1 is 10; allow sampling noise.
    assert 7 < top / tenth < 14


def test_popularity_order_is_permutation(corpus50):
    dois = list(corpus50.records)
    order = popularity_order(dois[::-1], SplitMix64(9))
    assert sorted(order) == sorted(dois)
    assert order == popularity_order(dois, SplitMix64(9))


def test_zipf_cumulative():
    cum = zipf_cumulative(4, 1.0)
    assert cum.tolist() == pytest.approx([1, 1.5, 1.5 + 1 / 3, 1.5 + 1 / 3 + 0.25])


def test_write_trace_and_sidecar(tmp_path, corpus10):
    cfg = cfg_for(corpus10, end=date(2012, 3, 2))
    evs = simulate_trace(cfg)
    side = write_trace(evs, tmp_path / "trace.jsonl", cfg)
    assert side.name == "trace.jsonl.meta.json"
    meta = json.loads(side.read_text())
    assert meta["generator"] == "splitmix64"
    assert meta["seed"] == 42 and meta["events"] == len(evs)
    assert meta["corpus"]["records"] == 10
    assert parse_events(tmp_path / "trace.jsonl") == evs


# -- sampler checks ---------------------------------------------------------------


def test_splitmix64_reference_outputs():
    # Published first outputs for seed 0 (same as java.util.SplittableRandom(0).nextLong()).
    rng = SplitMix64(0)
    assert [rng.next() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]


def test_poisson_sampler_matches_pmf():
    # Chi-square against the exact Poisson(4) pmf; critical value for df=10 at p=0.001 is 29.6.
    state = 12345
    draws = []
    for _ in range(20000):
        v, state = _kernels.poisson(state, 4.0)
        draws.append(v)
    counts = Counter(draws)
    chi2 = 0.0
    tail_obs, tail_exp = 0, 20000.0
    for k in range(11):
        exp = 20000 * math.exp(-4) * 4**k / math.factorial(k)
        chi2 += (counts.get(k, 0) - exp) ** 2 / exp
        tail_obs += counts.get(k, 0)
        tail_exp -= exp
    chi2 += ((20000 - tail_obs) - tail_exp) ** 2 / tail_exp
    assert chi2 < 29.6


def test_poisson_large_mean_moments():
    state = 7
    draws = []
    for _ in range(4000):
        v, state = _kernels.poisson(state, 1000.0)
        draws.append(v)
    assert abs(np.mean(draws) - 1000) < 4 * math.sqrt(1000 / 4000)
    assert 0.85 < np.var(draws) / 1000 < 1.15


def test_uniform_int_covers_range():
    state = 99
    seen = Counter()
    for _ in range(5000):
        v, state = _kernels.uniform_int(state, 3, 7)
        seen[v] += 1
    assert set(seen) == {3, 4, 5, 6, 7}
    assert all(900 < c < 1100 for c in seen.values())
