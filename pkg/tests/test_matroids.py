from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smsp import matroids as mat
from smsp.errors import (ClassesNotPartition, GroundTooLarge, InvalidMatroidSpec, NonLaminarFamily,
                         SparsityViolated, UnknownElement)

TRIANGLE = mat.Graphic({0: ("a", "b"), 1: ("b", "c"), 2: ("a", "c")})


def subsets(ground):
    g = list(ground)
    for k in range(len(g) + 1):
        yield from (frozenset(c) for c in itertools.combinations(g, k))


# ---------------------------------------------------------------------------
# worked examples
# ---------------------------------------------------------------------------


def test_uniform_examples():
    m = mat.build_matroid(mat.Uniform(2), 4)
    assert all(m.is_independent(S) == (len(S) <= 2) for S in subsets(range(4)))
    assert not m.is_independent({0, 1, 2})
    assert m.rank({0, 1, 2, 3}) == 2


def test_laminar_overlap_rejected():
    with pytest.raises(NonLaminarFamily):
        mat.build_matroid(mat.Laminar([(frozenset({0, 1}), 1), (frozenset({0, 2}), 1)]), 3)


def test_graphic_triangle():
    m = mat.build_matroid(TRIANGLE, 3)
    assert not m.is_independent({0, 1, 2})
    assert m.is_independent({0, 1})
    assert m.rank({0, 1, 2}) == 2
    assert m.is_spanned(2, {0, 1})
    r = m.restrict({0, 1})
    assert r.is_independent({0, 1})


def test_transversal_shared_vertex():
    m = mat.build_matroid(mat.Transversal({0: frozenset("x"), 1: frozenset("x")}), 2)
    assert not m.is_independent({0, 1})
    assert m.is_independent({1})


def test_empty_set_always_independent():
    for spec, n in [(mat.Uniform(0), 3), (TRIANGLE, 3), (mat.Partition({0: 0, 1: 0}), 2)]:
        assert mat.build_matroid(spec, n).is_independent(())


def test_partition_rank_and_spans():
    m = mat.build_matroid(mat.Partition({0: "a", 1: "a", 2: "b"}), 3)
    assert m.rank(m.elements) == 2
    assert m.unitary
    assert sorted(m.classes()["a"]) == [0, 1]
    u1 = mat.build_matroid(mat.Uniform(1), 2)
    assert u1.is_spanned(1, {0})
    assert not u1.is_spanned(0, set())


def test_restriction_examples():
    m = mat.build_matroid(mat.Uniform(2), 4)
    same = m.restrict(m.ground)
    assert all(same.is_independent(S) == m.is_independent(S) for S in subsets(range(4)))
    assert m.restrict({0}).rank({0}) == 1
    with pytest.raises(UnknownElement):
        m.restrict({0}).is_independent({1})


def test_unknown_element_and_bad_specs():
    m = mat.build_matroid(mat.Uniform(1), 3)
    with pytest.raises(UnknownElement):
        m.is_independent({5})
    with pytest.raises(ClassesNotPartition):
        mat.build_matroid(mat.Partition({0: 0}), 2)
    with pytest.raises(InvalidMatroidSpec):
        mat.matroid_spec_from_json({"kind": "nonsense"})


def test_verify_axioms_counterexamples():
    closure = mat.verify_axioms(mat.ExplicitFamily(range(2), [(), (0, 1)]))
    assert not closure.ok and closure.failure == "downward_closure"
    assert closure.counterexample["subset"] == [0]

    exch = mat.verify_axioms(mat.ExplicitFamily(range(3), [(), (0,), (1,), (2,), (0, 1)]))
    assert not exch.ok and exch.failure == "exchange"
    assert frozenset(exch.counterexample["I"]) == {0, 1}
    assert frozenset(exch.counterexample["J"]) == {2}

    empty = mat.verify_axioms(mat.ExplicitFamily(range(2), [(0,)]))
    assert not empty.ok and empty.failure == "empty"


def test_verify_axioms_size_guard():
    with pytest.raises(GroundTooLarge):
        mat.verify_axioms(mat.build_matroid(mat.Uniform(2), 17))


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------


def _matching_exists(S, adj):
    # try every injective assignment (tiny sizes only)
    S = sorted(S)
    right = sorted(set().union(*(adj[u] for u in S))) if S else []
    for perm in itertools.permutations(right, len(S)):
        if all(perm[i] in adj[u] for i, u in enumerate(S)):
            return True
    return not S


def _forest(S, edges):
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for u in S:
        a, b = find(edges[u][0]), find(edges[u][1])
        if a == b:
            return False
        parent[a] = b
    return True


def _rank_fraction(S, cols, p=mat.PRIME):
    # independent Gauss-Jordan over GF(p)
    rows = [list(cols[u]) for u in S]
    rank, width = 0, len(rows[0]) if rows else 0
    for c in range(width):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], p - 2, p)
        for r in range(len(rows)):
            if r != rank and rows[r][c] % p:
                fac = rows[r][c] * inv % p
                rows[r] = [(x - fac * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@pytest.mark.parametrize("seed", range(6))
def test_transversal_matches_bruteforce(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 7)
    adj = {u: frozenset(rng.sample(range(4), rng.randint(0, 2))) for u in range(n)}
    m = mat.build_matroid(mat.Transversal(adj), n)
    for S in subsets(range(n)):
        assert m.is_independent(S) == _matching_exists(S, adj)


@pytest.mark.parametrize("seed", range(6))
def test_graphic_matches_bruteforce(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    edges = {u: tuple(rng.sample(range(5), 2)) for u in range(n)}
    m = mat.build_matroid(mat.Graphic(edges), n)
    for S in subsets(range(n)):
        assert m.is_independent(S) == _forest(S, edges)


@pytest.mark.parametrize("seed", range(6))
def test_linear_matches_bruteforce(seed):
    rng = random.Random(seed)
    n, dim = rng.randint(1, 8), 3
    cols = {}
    for u in range(n):
        v = [0] * dim
        for i in rng.sample(range(dim), rng.randint(1, 2)):
            v[i] = rng.randrange(1, 5)
        cols[u] = v
    m = mat.build_matroid(mat.LinearSparse(cols, 2), n)
    for S in subsets(range(n)):
        assert m.rank(S) == _rank_fraction(S, cols)


def test_linear_sparsity_enforced():
    with pytest.raises(SparsityViolated):
        mat.build_matroid(mat.LinearSparse({0: (1, 1, 1)}, 2), 1)


def test_rank_mod_p_golden():
    assert mat.rank_mod_p([(1, 2), (2, 4)]) == 1
    assert mat.rank_mod_p([(1, 0), (0, 1), (1, 1)]) == 2
    assert mat.rank_mod_p([]) == 0


def test_json_roundtrip_every_family():
    specs = [
        mat.Uniform(2),
        mat.Partition({0: 0, 1: 1, 2: 1, 3: 0}, {0: 1, 1: 2}),
        mat.Graphic({0: (0, 1), 1: (1, 2), 2: (0, 2), 3: (2, 3)}),
        mat.Laminar([(frozenset({0, 1}), 1), (frozenset({0, 1, 2, 3}), 2)]),
        mat.Transversal({0: frozenset({0}), 1: frozenset({0, 1}), 2: frozenset({1}), 3: frozenset()}),
        mat.LinearSparse({0: (1, 0), 1: (0, 1), 2: (1, 1), 3: (2, 2)}, 2),
        mat.Restriction(mat.Uniform(2), frozenset({0, 2})),
    ]
    for spec in specs:
        back = mat.matroid_spec_from_json(mat.matroid_spec_to_json(spec))
        a, b = mat.build_matroid(spec, 4), mat.build_matroid(back, 4)
        for S in subsets(a.ground):
            assert a.is_independent(S) == b.is_independent(S), (spec, S)


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 7), st.integers(0, 2**32 - 1))
def test_random_graphic_satisfies_axioms(n, seed):
    rng = random.Random(seed)
    edges = {u: tuple(rng.sample(range(4), 2)) for u in range(n)}
    assert mat.verify_axioms(mat.build_matroid(mat.Graphic(edges), n)).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_random_transversal_rank_is_submodular(n, seed):
    rng = random.Random(seed)
    adj = {u: frozenset(rng.sample(range(3), rng.randint(1, 2))) for u in range(n)}
    m = mat.build_matroid(mat.Transversal(adj), n)
    all_sets = list(subsets(range(n)))
    for A in all_sets[:: max(1, len(all_sets) // 20)]:
        for B in all_sets[:: max(1, len(all_sets) // 20)]:
            assert m.rank(A) + m.rank(B) >= m.rank(A | B) + m.rank(A & B)


def test_basis_is_maximal():
    m = mat.build_matroid(TRIANGLE, 3)
    B = m.basis()
    assert m.is_independent(B) and len(B) == 2
