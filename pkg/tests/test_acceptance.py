"""Acceptance criteria at their full trial counts and tolerances.

Each test prints a single PASS/FAIL line before asserting, so a failing
criterion still reports what was measured.
"""

from __future__ import annotations

import time

from smsp import instances as gen
from smsp import invariants as inv


def _summary(results) -> tuple[bool, str]:
    bad = [r for r in results if not r.ok]
    if not bad:
        return True, f"{len(results)} checks"
    return False, "; ".join(f"{r.name} measured={r.measured!r} threshold={r.threshold!r}" for r in bad)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_bound_table(verdict):
    results, dt = _timed(inv.inv_bounds)
    ok, msg = _summary(results)
    ok &= dt < 1.0
    verdict(1, ok, f"bound table, {msg}, {dt:.3f}s (limit 1s)")
    assert ok


def test_criterion_2_exact_identities(verdict):
    pool = [i for i in gen.shipped_instances() if i.matroid.n <= 12]
    families = {type(i.matroid).__name__ for i in pool}
    results, dt = _timed(lambda: inv.inv_lemma_identity(pool, trials=10_000, seed=0))
    ok, msg = _summary(results)
    ok &= len(families) >= 5 and dt < 120
    verdict(2, ok, f"per-trial identities over {len(families)} families, {msg}, {dt:.1f}s (limit 120s)")
    assert ok


def test_criterion_3_expectation_lemmas(verdict):
    def run():
        non = gen.shipped_instance(inv.EXPECTATION_INSTANCES["nonmonotone"])
        mono = gen.shipped_instance(inv.EXPECTATION_INSTANCES["monotone"])
        assert non.matroid.n == 12 and mono.matroid.n == 12
        return (inv.inv_expectations(non, "partition", 1 / 3, trials=100_000, seed=0)
                + inv.inv_expectations(mono, "partition", None, trials=100_000, seed=0, variant="monotone"))

    results, dt = _timed(run)
    ok, msg = _summary(results)
    ok &= dt < 300
    verdict(3, ok, f"expectation checks at 1e5 trials, {msg}, {dt:.1f}s (limit 300s)")
    assert ok


def test_criterion_4_coupling(verdict):
    results = inv.inv_coupling(10_000, seed=0)
    mismatches = sum(not r.ok for r in results)
    ok = len(results) == 10_000 and mismatches == 0
    verdict(4, ok, f"{len(results)} coupled tuples, {mismatches} mismatches")
    assert ok


def test_criterion_5_partition(verdict):
    def run():
        return inv.inv_partition(n=20, classes=4, trials=200_000, seed=0) + [inv.inv_alpha_bound(10**6)]

    results, dt = _timed(run)
    ok, msg = _summary(results)
    ok &= dt < 180
    verdict(5, ok, f"partition probabilities at 2e5 trials, {msg}, {dt:.1f}s (limit 180s)")
    assert ok


def test_criterion_6_dynkin(verdict):
    results = inv.inv_dynkin(n=100, trials=100_000, seed=0) + inv.inv_dynkin_capped(n=100, trials=100_000, seed=1)
    ok, msg = _summary(results)
    pr = results[0].measured
    verdict(6, ok, f"Pr[max selected]={pr:.4f}, {msg}")
    assert ok


def test_criterion_7_end_to_end(verdict):
    shipped = gen.shipped_instances()
    results = inv.inv_end_to_end(shipped, trials=100_000, seed=0, extras=False)
    ok, msg = _summary(results)
    ok &= len(results) == len(shipped)
    verdict(7, ok, f"guarantee on {len(shipped)} shipped instances at 1e5 trials, {msg}")
    assert ok


def test_criterion_8_oracles(verdict):
    cfg = inv.InvariantConfig(suite="oracles", seed=0)

    def run():
        out = []
        for _, check in inv.suite_checks(cfg):
            out += check()
        out += inv.inv_learning_set(gen.shipped_instance("partition-coverage"), trials=20_000, seed=0)
        out += [inv.inv_partial_uniform(trials=24_000, seed=0), inv.inv_arrival_uniform(trials=24_000, seed=0)]
        return out

    results, dt = _timed(run)
    ok, msg = _summary(results)
    ok &= dt < 120
    verdict(8, ok, f"oracle suites, {msg}, {dt:.1f}s (limit 120s)")
    assert ok
