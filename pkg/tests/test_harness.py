from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from cmcsp.harness import (
    WORKERS_ENV,
    agrees,
    bench_sweep,
    crosscheck,
    ddmin,
    fit_bench,
    growth_ratios,
    median_times,
    run_pool,
    worker_count,
)


def record(n, k, s, rep, seconds, gauss=0.0):
    return {"n": n, "k": k, "s": s, "target_s": s, "rep": rep, "seconds": seconds + gauss,
            "gauss_seconds": gauss, "seconds_no_gauss": seconds}


# --- worker pool --------------------------------------------------------------------------

def test_worker_count_env(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert worker_count() == 1 and worker_count(3) == 3
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert worker_count() == 4
    monkeypatch.setenv(WORKERS_ENV, "0")
    assert worker_count() == 1
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ValueError):
        worker_count()


@pytest.mark.parametrize("workers", [1, 2])
def test_run_pool_keeps_task_order(workers):
    tasks = list(range(-20, 20))
    assert run_pool(abs, tasks, workers) == [abs(t) for t in tasks]


# --- delta debugging --------------------------------------------------------------------------

@given(st.lists(st.integers(0, 30), min_size=1, max_size=25, unique=True), st.data())
def test_ddmin_is_one_minimal(items, data):
    needed = set(data.draw(st.lists(st.sampled_from(items), min_size=1, max_size=3)))

    def failing(sub):
        return needed <= set(sub)

    out = ddmin(items, failing)
    assert failing(out)
    # removing any single element makes the failure go away
    for i in range(len(out)):
        assert not failing(out[:i] + out[i + 1:])
    assert set(out) == needed


def test_ddmin_requires_failing_input():
    with pytest.raises(AssertionError):
        ddmin([1, 2], lambda sub: False)


# --- timing summaries -------------------------------------------------------------------------

def test_median_times_and_growth_ratios():
    recs = [record(3, 3, s, rep, s * f) for s in (100, 200, 400) for rep, f in enumerate((1.0, 1.1, 5.0))]
    med = median_times(recs)
    assert med == pytest.approx({(3, 3, 100): 110.0, (3, 3, 200): 220.0, (3, 3, 400): 440.0})
    rows = growth_ratios(recs)
    assert [(r["s_from"], r["s_to"]) for r in rows] == [(100, 200), (200, 400)]
    for r in rows:
        assert r["ratio"] == pytest.approx(2.0)
        assert r["paired_ratio"] == pytest.approx(2.0)
        assert r["per_doubling"] == pytest.approx(2.0)


def test_growth_ratio_per_doubling_rescales():
    recs = [record(2, 1, s, 0, t) for s, t in ((100, 1.0), (400, 4.0))]
    (row,) = growth_ratios(recs)
    assert row["ratio"] == pytest.approx(4.0)
    assert row["per_doubling"] == pytest.approx(2.0)


def test_paired_ratio_cancels_slow_repetition():
    # repetition 1 ran on a machine twice as slow for both sizes
    recs = [record(3, 3, 100, 0, 1.0), record(3, 3, 200, 0, 2.0),
            record(3, 3, 100, 1, 2.0), record(3, 3, 200, 1, 4.0),
            record(3, 3, 100, 2, 1.0), record(3, 3, 200, 2, 2.0)]
    (row,) = growth_ratios(recs)
    assert row["paired_ratio"] == pytest.approx(2.0)


@given(st.floats(1e-7, 1e-4), st.floats(1e-14, 1e-10), st.sampled_from([2.0, 2.5, 3.0]))
def test_fit_recovers_coefficients(a, b, omega):
    recs = []
    for n, k in ((2, 1), (3, 3)):
        for s in (100, 300, 1000, 3000):
            recs.append({"n": n, "k": k, "s": s, "target_s": s, "rep": 0,
                         "seconds": a * k * n * s + b * s ** omega, "seconds_no_gauss": a * k * n * s})
    fit = fit_bench(recs, omega=omega)
    assert fit["coefficients"]["linear"] == pytest.approx(a, rel=1e-6)
    assert fit["coefficients"]["gauss"] == pytest.approx(b, rel=1e-6)
    assert fit["r2"] == pytest.approx(1.0)
    assert fit["points"] == len(recs)


def test_fit_loglog_slope_of_linear_times():
    recs = [record(3, 3, s, 0, 1e-5 * s) for s in (1000, 2000, 4000, 8000)]
    fit = fit_bench(recs)
    assert fit["loglog_slope"] == pytest.approx(1.0)
    assert fit["per_constraint_spread"] == pytest.approx(1.0)
    assert fit_bench([])["coefficients"] is None


# --- sweeps and cross-checks ------------------------------------------------------------------

def test_bench_sweep_records():
    recs = bench_sweep([2], [1, 2], [20, 40], seed=3, reps=2, workers=1)
    assert len(recs) == 2 * 2 * 2
    for r in recs:
        assert r["seconds"] >= r["gauss_seconds"] >= 0
        assert r["depth"] == r["k"] - 1
        assert r["oracle"] in (None, r["verdict"])


def test_agrees():
    base = {"solve": "ACCEPT", "oracle": "ACCEPT", "datalog": None, "witness_ok": True}
    assert agrees(base)
    assert not agrees({**base, "oracle": "REJECT"})
    assert not agrees({**base, "witness_ok": False})
    assert agrees({**base, "oracle": None, "datalog": "ACCEPT"})


@pytest.mark.parametrize("n,k", [(2, 1), (3, 2)])
def test_crosscheck_agrees(n, k):
    seeds = random.Random(n * 10 + k).sample(range(10**6), 15)
    records, bad = crosscheck(n, k, seeds, max_vars=6, max_constraints=12, workers=1)
    assert bad is None
    assert [r["seed"] for r in records] == seeds
    assert all(r["agree"] for r in records)
