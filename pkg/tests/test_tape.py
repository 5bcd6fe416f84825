from __future__ import annotations

import pytest

from smsp.tape import RandomTape, ScriptedTape, derive_seed


def test_derive_seed_is_stable_and_keyed():
    assert derive_seed(1, "a") == derive_seed(1, "a")
    assert derive_seed(1, "a") != derive_seed(1, "b")
    assert derive_seed(1, 0) != derive_seed(2, 0)


def test_streams_are_independent_of_draw_interleaving():
    a, b = RandomTape(7), RandomTape(7)
    xs = [a.random("x") for _ in range(3)]
    b.random("y")
    assert [b.random("x") for _ in range(3)] == xs


def test_children_replay():
    root = RandomTape(3)
    assert root.child(5).permutation("p", range(6)) == RandomTape(3).child(5).permutation("p", range(6))
    assert root.child(5).random("x") != root.child(6).random("x")


def test_coin_always_consumes_a_draw():
    a, b = RandomTape(1), RandomTape(1)
    a.coin("c", 0.0)
    b.coin("c", 1.0)
    assert a.random("c") == b.random("c")


def test_binomial_bounds():
    t = RandomTape(0)
    assert t.binomial("b", 0, 0.5) == 0
    assert all(0 <= t.binomial("b", 5, 0.5) <= 5 for _ in range(50))


def test_scripted_tape():
    t = ScriptedTape(0, {"c": [True, False], "sub/x": [3]})
    assert t.coin("c", 0.0) is True
    assert t.coin("c", 1.0) is False
    assert t.fork("sub").randrange("x", 10) == 3
    with pytest.raises(ValueError):
        ScriptedTape(0, {"p": [[0, 0]]}).permutation("p", [0, 1])
