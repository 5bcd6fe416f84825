from __future__ import annotations

import json

import pytest

from smsp import instances as gen
from smsp import objectives as obj
from smsp.errors import InvalidConfig, UnknownGenerator

# (name, n, matroid family, registered Linear, optimum value) for every shipped instance
SHIPPED = [
    ("partition-coverage", 12, "PartitionMatroid", "partition", 9.0),
    ("partition-maxweight", 12, "PartitionMatroid", "partition", 0.833733),
    ("partition-cut-shifted", 12, "PartitionMatroid", "partition", 16.124125),
    ("uniform1-cut", 10, "UniformMatroid", "dynkin-capped", 2.713074),
    ("uniform1-coverage", 10, "UniformMatroid", "dynkin-capped", 2.392252),
    ("uniform3-coverage", 12, "UniformMatroid", "greedy-online", 9.0),
    ("uniform2-cut", 10, "UniformMatroid", "greedy-online", 5.025666),
    ("laminar-weighted-rank", 10, "LaminarMatroid", "dynkin-capped", 1.567871),
    ("graphic-coverage", 10, "GraphicMatroid", "dynkin-capped", 8.0),
    ("transversal-cut", 10, "TransversalMatroid", "dynkin-capped", 8.443939),
    ("linear-linear-shifted", 9, "LinearMatroid", "dynkin-capped", 4.177481),
]


def test_generator_is_deterministic():
    a = gen.generate_spec("uniform(n=12,k=3)+coverage(universe=20)", 7)
    b = gen.generate_spec("uniform(n=12,k=3)+coverage(universe=20)", 7)
    assert gen.spec_to_json(a) == gen.spec_to_json(b)
    c = gen.generate_spec("uniform(n=12,k=3)+coverage(universe=20)", 8)
    assert gen.spec_to_json(a) != gen.spec_to_json(c)


def test_empty_instance():
    inst = gen.generate_instance("uniform(n=0,k=1)+coverage", 0)
    assert inst.n == 0 and obj.offline_opt(inst.objective, inst.matroid) == (frozenset(), 0.0)


def test_partition_maxweight_opt_is_one_max_per_class():
    inst = gen.generate_instance("partition(n=20,classes=4)+linear", 3)
    S, _ = obj.offline_opt(inst.objective, inst.matroid)
    w = inst.objective.w
    tops = {max(members, key=lambda u: w[u]) for members in inst.matroid.classes().values()}
    assert S == tops
    mw = gen.generate_instance("partition(n=20,classes=4)+maxweight", 3)
    S, v = obj.offline_opt(mw.objective, mw.matroid)
    assert v == max(mw.objective.spec.w.values())


def test_unknown_generators():
    with pytest.raises(UnknownGenerator):
        gen.generate_instance("hexagon(n=3)+linear", 0)
    with pytest.raises(UnknownGenerator):
        gen.generate_instance("uniform(n=3,k=1)+sparkle", 0)
    with pytest.raises(UnknownGenerator):
        gen.generate_instance("uniform(n=3,k=1)", 0)


def test_document_roundtrip(tmp_path):
    spec = gen.generate_spec("laminar(n=8,blocks=2)+cut(density=0.5)+shift(c=0.5)", 4)
    path = tmp_path / "inst.json"
    gen.save_instance(spec, path)
    a, b = spec.build(), gen.load_instance(path)
    for S in obj.independent_sets(a.matroid):
        assert b.matroid.is_independent(S)
        assert a.objective.value(S) == b.objective.value(S)
    doc = json.loads(path.read_text())
    assert {"ground", "matroid", "objective"} <= set(doc)
    assert gen.resolve_instance(str(path)).n == 8


def test_ground_as_list_and_bad_documents():
    doc = {"ground": [0, 1, 2], "matroid": {"kind": "uniform", "k": 1},
           "objective": {"kind": "linear", "w": [1, 2, 3]}}
    assert gen.spec_from_json(doc).build().n == 3
    with pytest.raises(InvalidConfig):
        gen.spec_from_json({"ground": [0, 2], "matroid": {}, "objective": {}})
    with pytest.raises(InvalidConfig):
        gen.spec_from_json({"ground": 2})


@pytest.mark.parametrize("name,n,family,linear,opt", SHIPPED)
def test_shipped_instances_frozen(name, n, family, linear, opt):
    inst = gen.shipped_instance(name)
    assert inst.n == n and type(inst.matroid).__name__ == family
    assert inst.meta["linear"] == linear
    _, v = obj.offline_opt(inst.objective, inst.matroid)
    assert v == pytest.approx(opt, abs=1e-9)
    if n <= 10:  # exhaustive check limit
        assert obj.check_submodular(inst.objective).ok
    gen.linear_alpha(linear, inst)


def test_linear_alpha_choices():
    inst = gen.shipped_instance("uniform3-coverage")
    assert gen.linear_alpha("greedy-online", inst) == (4.0, None)
    part = gen.shipped_instance("partition-coverage")
    a, q = gen.linear_alpha("partition", part)
    assert a == pytest.approx(2.542442821623457) and q == pytest.approx(1 / a)
    with pytest.raises(InvalidConfig):
        gen.linear_alpha("greedy-online", part)
