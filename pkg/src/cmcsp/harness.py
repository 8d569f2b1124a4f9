"""Batch harness: worker pool, timing sweeps with a least-squares fit, and cross-checking."""

from __future__ import annotations

import gc
import os
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from .solver import Instance, brute_force_oracle, generate, satisfies, seeded_instance, solve
from .errors import CapacityError

WORKERS_ENV = "CMCSP_WORKERS"


def worker_count(default: int = 1) -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw)) if raw else default
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def run_pool(fn: Callable, tasks: Sequence, workers: int | None = None) -> list:
    """Apply ``fn`` to each task; results come back in task order whatever the worker count."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


# --- timing -----------------------------------------------------------------------------

def timed_solve(inst: Instance) -> tuple:
    """``(result, wall seconds, GF(2) seconds)`` with the cyclic collector paused during the run."""
    stats: dict = {}
    gc.collect()
    enabled = gc.isenabled()
    gc.disable()
    try:
        start = time.perf_counter()
        res = solve(inst, witness=False, stats=stats)
        elapsed = time.perf_counter() - start
    finally:
        if enabled:
            gc.enable()
    return res, elapsed, stats.get("gauss_seconds", 0.0)


def bench_instance(n: int, k: int, s: int, seed: int, vars_per_constraint: float = 0.5) -> Instance:
    rng = random.Random(seed)
    inst, _ = generate(n, k, max(2, int(s * vars_per_constraint)), s, "planted", rng)
    return inst


def _oracle_verdict(inst: Instance, max_vars: int) -> str | None:
    if len(inst.variables) > max_vars:
        return None
    try:
        return "ACCEPT" if brute_force_oracle(inst) is not None else "REJECT"
    except CapacityError:
        return None


def _bench_group(task: tuple) -> list[dict]:
    """All sizes for one ``(n, k)``; repetitions run round-robin over the sizes.

    Interleaving spreads slow and fast periods of the machine evenly over the
    sizes, so ratios between sizes are not skewed by when each size ran.
    """
    n, k, sizes, seed, reps, oracle_max_vars, warmup = task
    insts = [bench_instance(n, k, s, seed + i) for i, s in enumerate(sizes)]
    oracles = [_oracle_verdict(inst, oracle_max_vars) for inst in insts]
    for inst in insts:
        for _ in range(warmup):
            timed_solve(inst)
    out = []
    for rep in range(reps):
        for i, (s, inst) in enumerate(zip(sizes, insts)):
            res, elapsed, gauss = timed_solve(inst)
            if oracles[i] is not None and oracles[i] != res.verdict:
                raise AssertionError(f"solve and oracle disagree on bench instance n={n} k={k} s={s} seed={seed + i}")
            out.append({
                "kind": "bench", "n": n, "k": k, "vars": len(inst.variables), "s": inst.size,
                "target_s": s, "seed": seed + i, "rep": rep, "verdict": res.verdict, "seconds": elapsed,
                "gauss_seconds": gauss, "seconds_no_gauss": elapsed - gauss, "depth": len(res.chain),
                "oracle": oracles[i],
            })
    return sorted(out, key=lambda r: (r["target_s"], r["rep"]))


def bench_sweep(ns: Iterable[int], ks: Iterable[int], sizes: Iterable[int], seed: int, reps: int = 5,
                oracle_max_vars: int = 10, workers: int | None = None, warmup: int = 1) -> list[dict]:
    """Time ``reps`` runs per size after ``warmup`` untimed runs; each size gets its own seeded instance.

    Pool workers take whole ``(n, k)`` groups.
    """
    sizes = list(sizes)
    tasks = [(n, k, sizes, seed, reps, oracle_max_vars, warmup) for n in ns for k in ks]
    return [r for rs in run_pool(_bench_group, tasks, workers) for r in rs]


def median_times(records: list[dict], key: str = "seconds_no_gauss") -> dict:
    """Median time per ``(n, k, target_s)``."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r["n"], r["k"], r["target_s"]), []).append(r[key])
    return {g: statistics.median(v) for g, v in sorted(groups.items())}


def growth_ratios(records: list[dict], key: str = "seconds_no_gauss") -> list[dict]:
    """Growth between consecutive sizes per ``(n, k)``.

    ``ratio`` divides the medians.  ``paired_ratio`` is the median over
    repetitions of the ratio within one repetition, where the two sizes ran
    back to back; it cancels slowdowns of the machine lasting longer than a
    single run.  ``*_per_doubling`` rescale to one doubling of ``s``.
    """
    med = median_times(records, key)
    times: dict = {}
    for r in records:
        times.setdefault((r["n"], r["k"]), {}).setdefault(r["target_s"], {})[r["rep"]] = r[key]
    out = []
    for (n, k), by_s in sorted(times.items()):
        sizes = sorted(by_s)
        for s1, s2 in zip(sizes, sizes[1:]):
            t1, t2 = med[(n, k, s1)], med[(n, k, s2)]
            ratio = t2 / t1 if t1 > 0 else float("inf")
            reps = sorted(set(by_s[s1]) & set(by_s[s2]))
            paired = statistics.median(by_s[s2][r] / by_s[s1][r] for r in reps if by_s[s1][r] > 0) if reps else None
            doublings = float(np.log2(s2 / s1)) if s1 > 0 else 0.0

            def per(x):
                return float(x ** (1 / doublings)) if x is not None and doublings > 0 else None

            out.append({"n": n, "k": k, "s_from": s1, "s_to": s2, "ratio": ratio, "per_doubling": per(ratio),
                        "paired_ratio": paired, "paired_per_doubling": per(paired)})
    return out


def fit_bench(records: list[dict], omega: float = 3.0, key: str = "seconds") -> dict:
    """Least squares for ``t = a*k*n*s + b*s**omega`` over all records.

    Also reports the log-log slope of the Gaussian-free times and the spread of
    time per constraint, the ratio of its largest to smallest value.
    """
    if not records:
        return {"omega": omega, "coefficients": None, "points": 0}
    kns = np.array([r["k"] * r["n"] * r["s"] for r in records], dtype=float)
    s = np.array([r["s"] for r in records], dtype=float)
    t = np.array([r[key] for r in records], dtype=float)
    # scale columns so lstsq is well conditioned
    cols = [kns, s ** omega]
    scale = np.array([c.max() if c.max() > 0 else 1.0 for c in cols])
    design = np.column_stack(cols) / scale
    coef, *_ = np.linalg.lstsq(design, t, rcond=None)
    coef = coef / scale
    pred = np.column_stack(cols) @ coef
    ss_res = float(((t - pred) ** 2).sum())
    ss_tot = float(((t - t.mean()) ** 2).sum())
    out = {
        "omega": omega,
        "coefficients": {"linear": float(coef[0]), "gauss": float(coef[1])},
        "r2": 1 - ss_res / ss_tot if ss_tot > 0 else 1.0,
        "points": len(records),
    }
    med = median_times(records)
    xs = np.array([g[2] for g in med], dtype=float)
    ys = np.array(list(med.values()), dtype=float)
    if len(set(xs)) > 1 and (ys > 0).all():
        out["loglog_slope"] = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
        per = ys / xs
        out["per_constraint_spread"] = float(per.max() / per.min())
    return out


# --- cross-checking ------------------------------------------------------------------------

def _verdicts(inst: Instance) -> dict:
    res = solve(inst)
    out = {"solve": res.verdict, "witness_ok": res.witness is None or satisfies(inst, res.witness)}
    try:
        out["oracle"] = "ACCEPT" if brute_force_oracle(inst) is not None else "REJECT"
    except CapacityError:
        out["oracle"] = None
    out["datalog"] = None
    if inst.k == 1:
        from .gdatalog import datalog_rejects
        out["datalog"] = "REJECT" if datalog_rejects(inst) else "ACCEPT"
    return out


def agrees(v: dict) -> bool:
    answers = {v["solve"]} | {v[key] for key in ("oracle", "datalog") if v[key] is not None}
    return len(answers) == 1 and v["witness_ok"]


def _crosscheck_task(task: tuple) -> dict:
    n, k, seed, max_vars, max_constraints = task
    inst, _ = seeded_instance(n, k, seed, max_vars, max_constraints)
    v = _verdicts(inst)
    return {"kind": "crosscheck", "n": n, "k": k, "seed": seed, "vars": len(inst.variables),
            "s": inst.size, **v, "agree": agrees(v)}


def ddmin(items: list, failing: Callable[[list], bool]) -> list:
    """Delta debugging: a 1-minimal sublist on which ``failing`` still holds."""
    assert failing(items), "ddmin needs a failing input"
    parts = 2
    while len(items) >= 2:
        size = -(-len(items) // parts)
        chunks = [items[i:i + size] for i in range(0, len(items), size)]
        reduced = False
        for i, chunk in enumerate(chunks):
            if failing(chunk):
                items, parts, reduced = chunk, 2, True
                break
            rest = [x for j, c in enumerate(chunks) if j != i for x in c]
            if failing(rest):
                items, parts, reduced = rest, max(parts - 1, 2), True
                break
        if not reduced:
            if parts >= len(items):
                break
            parts = min(len(items), parts * 2)
    return items


def minimize_disagreement(inst: Instance) -> Instance:
    """Drop constraints while the three procedures still disagree."""
    cons = sorted(inst.items(), key=lambda st: (str(st[0]), tuple(map(str, st[1]))))

    def build(sub: list) -> Instance:
        out = Instance(inst.n, inst.k, inst.variables)
        for sym, t in sub:
            out.add(sym, t)
        return out

    def failing(sub: list) -> bool:
        return not agrees(_verdicts(build(sub)))

    if not cons or not failing(cons):
        return inst
    small = build(ddmin(cons, failing))
    used = {x for _, t in small.items() for x in t}
    return small.restrict([x for x in inst.variables if x in used] or inst.variables[:1])


def crosscheck(n: int, k: int, seeds: Iterable[int], max_vars: int = 10, max_constraints: int = 25,
               workers: int | None = None) -> tuple[list[dict], dict | None]:
    """Records per seed and, on the first disagreement, its minimized counterexample."""
    tasks = [(n, k, s, max_vars, max_constraints) for s in seeds]
    records = run_pool(_crosscheck_task, tasks, workers)
    bad = next((r for r in records if not r["agree"]), None)
    if bad is None:
        return records, None
    inst, _ = seeded_instance(n, k, bad["seed"], max_vars, max_constraints)
    small = minimize_disagreement(inst)
    return records, {"seed": bad["seed"], "instance": small.to_json(), **_verdicts(small)}


__all__ = [
    "WORKERS_ENV", "worker_count", "run_pool", "timed_solve", "bench_instance", "bench_sweep",
    "median_times", "growth_ratios", "fit_bench", "agrees", "ddmin", "minimize_disagreement", "crosscheck",
]
