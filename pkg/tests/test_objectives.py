from __future__ import annotations

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smsp import instances as gen
from smsp import matroids as mat
from smsp import objectives as obj
from smsp.errors import ElementAlreadyInSet, ObjectiveError, GroundTooLargeForExactOpt, SetTooLargeForExactConvolution


def lin(w):
    return obj.build_objective(obj.Linear(dict(enumerate(w))), len(w))


def cov(covers):
    return obj.build_objective(obj.Coverage({u: frozenset(c) for u, c in covers.items()}), len(covers))


def subsets(ground):
    g = list(ground)
    for k in range(len(g) + 1):
        yield from (frozenset(c) for c in itertools.combinations(g, k))


def test_values():
    assert lin([2, 3]).value({0, 1}) == 5
    mw = obj.build_objective(obj.MaxWeight({0: 2, 1: 3}), 2)
    assert mw.value({0, 1}) == 3
    assert mw.value(()) == 0
    assert cov({0: "ab", 1: "bc"}).value({0, 1}) == 3


def test_marginals():
    assert lin([7, 1]).marginal(0, {1}) == 7
    assert obj.build_objective(obj.MaxWeight({0: 5, 1: 3}), 2).marginal(1, {0}) == 0
    assert cov({0: "a", 1: "a"}).marginal(1, {0}) == 0
    with pytest.raises(ElementAlreadyInSet):
        lin([1, 1]).marginal(0, {0})


def test_negative_weights():
    with pytest.raises(ObjectiveError):
        lin([-1.0, 2.0])
    w = obj.WeightVector({0: -1.0, 1: 2.0})
    assert w[0] == 0.0 and w[5] == 0.0
    assert w.total({0, 1}) == 2.0


def test_weighted_coverage_and_cut():
    f = obj.build_objective(obj.Coverage({0: frozenset("ab"), 1: frozenset("b")}, {"a": 0.5, "b": 2.0}), 2)
    assert f.value({0}) == 2.5
    assert f.value({1}) == 2.0
    cut = obj.build_objective(obj.Cut([(0, 1, 1.0), (1, 2, 2.0)]), 3)
    assert cut.value({1}) == 3.0
    assert cut.value({0, 1, 2}) == 0.0
    shifted = obj.build_objective(obj.Shifted(obj.Cut([(0, 1, 1.0)]), 0.5), 2)
    assert shifted.value(()) == 0.5
    assert shifted.value({0}) == 1.5


def test_weighted_rank_value():
    f = obj.build_objective(obj.WeightedRank(mat.Uniform(2), {0: 3.0, 1: 2.0, 2: 1.0}), 3)
    assert f.value({0, 1, 2}) == 5.0
    assert f.value({2}) == 1.0


def test_call_count():
    f = lin([1, 2, 3])
    before = f.call_count
    f.value({0})
    f.value({1, 2})
    assert f.call_count == before + 2


# ---------------------------------------------------------------------------
# convolution
# ---------------------------------------------------------------------------


def test_convolution_examples():
    f = cov({0: "ab", 1: "bc"})
    assert obj.convolve_fw(f, {0: 1.0, 1: 1.0}, ()) == f.value(())
    g = lin([1.5, 2.0, 0.5])
    w = {0: 1.5, 1: 2.0, 2: 0.5}
    assert obj.convolve_fw(g, w, {0, 1, 2}) == pytest.approx(4.0)
    # min over A of max-weight(A) + w(S - A): A = {0, 1} gives 5
    mw = obj.build_objective(obj.MaxWeight({0: 5, 1: 4}), 2)
    assert obj.convolve_fw(mw, {0: 5, 1: 4}, {0, 1}) == 5.0


def test_convolution_guard():
    f = lin([1.0] * 21)
    with pytest.raises(SetTooLargeForExactConvolution):
        obj.convolve_fw(f, {}, range(21))


@pytest.mark.parametrize("seed", range(4))
def test_convolution_table_matches_bruteforce(seed):
    rng = random.Random(seed)
    inst = gen.generate_instance("uniform(n=6,k=2)+cut(density=0.6)+shift(c=0.3)", seed)
    f = inst.objective
    w = {u: rng.uniform(0, 2) for u in f.ground}
    table = obj.convolution_table(f, w)
    g = list(f.ground)
    for mask in range(1 << len(g)):
        S = [g[i] for i in range(len(g)) if mask >> i & 1]
        assert table[mask] == pytest.approx(obj.convolve_fw(f, w, S), abs=1e-12)


def test_convolution_function_is_submodular():
    inst = gen.generate_instance("uniform(n=6,k=2)+coverage(universe=8)", 3)
    w = {u: 0.7 for u in inst.ground}
    fw = obj.convolution_function(inst.objective, w)
    rep = obj.check_submodular(fw, list(inst.ground))
    assert rep.ok and rep.monotone


# ---------------------------------------------------------------------------
# greedy and the optimum
# ---------------------------------------------------------------------------


def test_greedy_examples():
    u2 = mat.build_matroid(mat.Uniform(2), 3)
    f = cov({0: "ab", 1: "bc", 2: "d"})
    assert obj.greedy(f, u2, ()) == []
    assert obj.greedy(f, u2, u2.ground) == [0, 1]
    assert obj.greedy_trace(f, u2, u2.ground) == [(0, 2.0), (1, 1.0)]
    # every singleton loses value
    neg = obj.FunctionObjective(range(3), lambda S: 1.0 - 0.5 * len(S))
    assert obj.greedy(neg, mat.build_matroid(mat.Uniform(3), 3), range(3)) == []


def test_greedy_half_on_example():
    u2 = mat.build_matroid(mat.Uniform(2), 3)
    f = cov({0: "ab", 1: "bc", 2: "d"})
    S = frozenset(obj.greedy(f, u2, u2.ground))
    for C in obj.independent_sets(u2):
        assert f.value(S) >= f.value(C | S) / 2


def test_offline_opt_examples():
    empty = obj.build_objective(obj.Linear({}), 0)
    assert obj.offline_opt(empty, mat.build_matroid(mat.Uniform(1), 0)) == (frozenset(), 0.0)
    S, v = obj.offline_opt(lin([5, 3, 1]), mat.build_matroid(mat.Uniform(2), 3))
    assert S == {0, 1} and v == 8
    _, v = obj.offline_opt(cov({0: "ab", 1: "bc", 2: "d"}), mat.build_matroid(mat.Uniform(2), 3))
    assert v == 3
    with pytest.raises(GroundTooLargeForExactOpt):
        obj.offline_opt(lin([1.0] * 21), mat.build_matroid(mat.Uniform(1), 21))


def test_max_weight_independent_matches_bruteforce():
    for seed in range(10):
        inst = gen.generate_instance("graphic(n=8,vertices=5)+linear", seed)
        rng = random.Random(seed)
        w = {u: rng.choice([0.0, 0.5, 1.0, rng.random()]) for u in inst.ground}
        fast = obj.max_weight_independent(inst.matroid, w, inst.ground)
        best = max(math.fsum(w[u] for u in S) for S in obj.independent_sets(inst.matroid))
        assert math.fsum(w[u] for u in fast) == pytest.approx(best)
        assert inst.matroid.is_independent(fast)


def test_independent_sets_enumerates_each_once():
    m = mat.build_matroid(mat.Partition({0: 0, 1: 0, 2: 1}), 3)
    got = list(obj.independent_sets(m))
    assert len(got) == len(set(got)) == 6


# ---------------------------------------------------------------------------
# submodularity checker
# ---------------------------------------------------------------------------


def test_check_submodular_examples():
    assert obj.check_submodular(lin([1, 2, 3])).modular
    bad = obj.FunctionObjective(range(4), lambda S: float(len(S) ** 2))
    rep = obj.check_submodular(bad)
    assert not rep.ok and not rep.submodular and rep.counterexample
    for name in ("coverage(universe=8)", "maxweight", "weighted_rank(k=2)", "cut(density=0.5)", "linear"):
        f = gen.generate_instance(f"uniform(n=6,k=2)+{name}", 0).objective
        assert obj.check_submodular(f).ok, name


def test_check_submodular_negative_values():
    rep = obj.check_submodular(obj.FunctionObjective(range(2), lambda S: -1.0))
    assert not rep.ok and not rep.nonnegative


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_coverage_properties(seed):
    inst = gen.generate_instance("uniform(n=6,k=2)+coverage(universe=6,weighted=1)", seed)
    f = inst.objective
    rng = random.Random(seed)
    w = {u: rng.uniform(0, 1.5) for u in f.ground}
    fw = obj.convolution_table(f, w)
    vals = f.subset_values(list(f.ground))
    assert all(a <= b + 1e-12 for a, b in zip(fw, vals))
    assert fw[0] == vals[0]


def test_json_roundtrip_objectives():
    specs = [
        obj.Linear({0: 1.0, 1: 2.0}),
        obj.Coverage({0: frozenset({"a"}), 1: frozenset({"a", "b"})}, {"a": 1.0, "b": 0.5}),
        obj.MaxWeight({0: 1.0, 1: 3.0}),
        obj.WeightedRank(mat.Uniform(1), {0: 1.0, 1: 2.0}),
        obj.Cut([(0, 1, 1.5)]),
        obj.Shifted(obj.Cut([(0, 1, 1.5)]), 0.25),
    ]
    for spec in specs:
        back = obj.objective_spec_from_json(obj.objective_spec_to_json(spec))
        a, b = obj.build_objective(spec, 2), obj.build_objective(back, 2)
        for S in subsets(range(2)):
            assert a.value(S) == b.value(S), spec
