from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_interval
from topodir.algebra import Network, path_consistency
from topodir.interval import (
    IA,
    IA_BASICS,
    Interval,
    NotBasicError,
    canonical_solution,
    chi,
    coarsen,
    epsilon_shift,
    ia_compose_oracle,
    ia_relation_of,
    network_from_intervals,
    tau,
    tau_network,
)


def basic_net(*constraints, names=("x", "y", "z")):
    used = sorted({v for a, _, b in constraints for v in (a, b)}, key=names.index)
    net = Network(IA, used)
    for a, rel, b in constraints:
        net.set(used.index(a), used.index(b), IA.rel(rel))
    return net


def test_interval_rejects_degenerate():
    with pytest.raises(ValueError):
        Interval(1, 1)
    with pytest.raises(ValueError):
        Interval(2, 1)


def test_relation_of_examples():
    assert ia_relation_of(Interval(0, 2), Interval(2, 5)) == "m"
    assert ia_relation_of(Interval(0, 1), Interval(0, 1)) == "eq"
    assert ia_relation_of(Interval(0, 3), Interval(1, 2)) == "di"


def test_oracle_examples():
    assert ia_compose_oracle("eq", "o") == {"o"}
    assert ia_compose_oracle("m", "m") == {"b"}
    assert ia_compose_oracle("o", "oi") == {"o", "oi", "s", "si", "d", "di", "f", "fi", "eq"}
    assert ia_compose_oracle("b", "bi") == set(IA_BASICS)


def test_oracle_eq_is_identity():
    for a in IA_BASICS:
        assert ia_compose_oracle("eq", a) == {a}


def test_coarsen_examples():
    assert coarsen("m", 7) == IA.rel("m", "o")
    assert coarsen("b", 7) == IA.rel("b")
    assert coarsen("d", 3) == IA.top() - IA.rel("b", "bi")
    with pytest.raises(ValueError):
        coarsen("d", 5)


def test_coarsenings_partition():
    for g in (3, 7):
        atoms = {coarsen(a, g).bits for a in IA_BASICS}
        assert len(atoms) == g
        total = 0
        for atom in atoms:
            assert total & atom == 0
            total |= atom
        assert total == IA.universe


def test_tau_examples():
    assert tau("m") == "o"
    assert tau("eq") == "eq"
    assert tau("si") == "di"
    assert {tau(a) for a in IA_BASICS} == {"b", "o", "d", "eq", "di", "oi", "bi"}


def test_canonical_examples():
    assert canonical_solution(basic_net(("x", "b", "y"))) == [Interval(0, 1), Interval(2, 3)]
    assert canonical_solution(basic_net(("x", "eq", "y"))) == [Interval(0, 1), Interval(0, 1)]
    assert canonical_solution(basic_net(("x", "o", "y"))) == [Interval(0, 2), Interval(1, 3)]


def test_canonical_detects_inconsistency():
    net = basic_net(("x", "b", "y"), ("y", "b", "z"), ("x", "bi", "z"))
    assert canonical_solution(net) is None


def test_canonical_rejects_non_basic():
    net = Network(IA, ["x", "y"])
    net.set(0, 1, IA.rel("b", "m"))
    with pytest.raises(NotBasicError):
        canonical_solution(net)


def test_canonical_round_trip():
    rng = random.Random(8)
    for _ in range(200):
        n = rng.randint(1, 6)
        ivs = [random_interval(rng) for _ in range(n)]
        names = [f"v{k}" for k in range(n)]
        net = network_from_intervals(names, ivs)
        sol = canonical_solution(net)
        assert network_from_intervals(names, sol) == net
        levels = sorted({v for iv in sol for v in (iv.lo, iv.hi)})
        assert levels == list(range(len(levels)))


def test_chi_examples():
    assert chi("m", Interval(0, 2), Interval(1, 3)) == Fraction(1, 2)
    assert chi("b", Interval(0, 1), Interval(2, 3)) == 0
    assert chi("s", Interval(1, 2), Interval(Fraction("0.9"), 3)) == Fraction(1, 10)
    assert chi("mi", Interval(1, 3), Interval(0, 2)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        chi("m", Interval(0, 1), Interval(2, 3))


def test_epsilon_shift_worked_example():
    x, y = epsilon_shift(basic_net(("x", "m", "y")), Fraction(8, 100))
    assert x == Interval(0, Fraction("1.02"))
    assert y == Interval(Fraction("1.01"), Fraction("2.03"))
    assert chi("m", x, y) == Fraction(1, 102)


def test_epsilon_shift_tau_fixed_is_exact():
    x, y = epsilon_shift(basic_net(("x", "b", "y")), Fraction(1, 3))
    assert ia_relation_of(x, y) == "b"
    assert chi("b", x, y) == 0


def test_epsilon_shift_chain():
    net = basic_net(("x", "m", "y"), ("y", "m", "z"), ("x", "b", "z"))
    eps = Fraction(1, 10)
    ivs = epsilon_shift(net, eps)
    for a, b, rel in ((0, 1, "m"), (1, 2, "m"), (0, 2, "b")):
        assert chi(rel, ivs[a], ivs[b]) < eps


def test_epsilon_shift_errors():
    with pytest.raises(ValueError):
        epsilon_shift(basic_net(("x", "m", "y")), 1)
    with pytest.raises(ValueError):
        epsilon_shift(basic_net(("x", "b", "y"), ("y", "b", "z"), ("x", "bi", "z")), Fraction(1, 2))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.sampled_from([Fraction(1, 10), Fraction(1, 1000)]))
def test_epsilon_shift_property(seed, eps):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    ivs = [random_interval(rng, 4) for _ in range(n)]
    net = network_from_intervals([f"v{k}" for k in range(n)], ivs)
    shifted = epsilon_shift(net, eps)
    for i, j in net.pairs():
        rel = IA.basic_names[net.m[i][j].bit_length() - 1]
        assert ia_relation_of(shifted[i], shifted[j]) == tau(rel)
        assert chi(rel, shifted[i], shifted[j]) < eps


def test_tau_network_keeps_satisfiability():
    rng = random.Random(21)
    for _ in range(100):
        n = rng.randint(2, 6)
        net = network_from_intervals([f"v{k}" for k in range(n)], [random_interval(rng) for _ in range(n)])
        assert path_consistency(tau_network(net)) is not None
