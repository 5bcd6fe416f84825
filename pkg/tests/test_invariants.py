from __future__ import annotations

import pytest

from smsp import invariants as inv
from smsp import objectives as obj


def test_supermodular_oracle_skips_everything_else():
    bad = obj.FunctionObjective(range(4), lambda S: float(len(S) ** 2))
    report = inv.check_invariants(inv.InvariantConfig(suite="bounds", objective=bad))
    first, *rest = report.entries
    assert first.name == "submodular[supplied]" and first.status == inv.FAIL
    assert rest and all(e.status == inv.SKIPPED for e in rest)
    assert not report.ok


def test_names_unique_and_anchored():
    report = inv.check_invariants(inv.InvariantConfig(suite="oracles", scale=0.05))
    names = [e.name for e in report.entries]
    assert len(names) == len(set(names))
    assert all(e.anchor for e in report.entries)
    assert report.ok, [e for e in report.failures()]


@pytest.mark.parametrize("suite", ["bounds", "wrapper", "partition", "dynkin", "expectations", "end-to-end"])
def test_suites_pass_at_small_scale(suite):
    report = inv.check_invariants(inv.InvariantConfig(suite=suite, scale=0.05))
    assert report.entries
    assert report.ok, [(e.name, e.measured, e.threshold, e.detail) for e in report.failures()]


def test_coupling_suite_counts_entries():
    report = inv.check_invariants(inv.InvariantConfig(suite="coupling", seeds=25))
    assert len(report.entries) == 25 and report.ok


def test_unknown_suite():
    with pytest.raises(ValueError):
        inv.suite_checks(inv.InvariantConfig(suite="everything"))


def test_statistical_helpers():
    assert inv.check_equal("e", [0.1, -0.1, 0.05, -0.05], "a").status == inv.PASS
    assert inv.check_equal("e", [1.0, 1.1, 0.9, 1.0], "a").status == inv.FAIL
    assert inv.check_at_least("b", [0.2, 0.3, 0.1], "a").status == inv.PASS
    assert inv.check_at_least("b", [-1.0, -1.1, -0.9], "a").status == inv.FAIL
