from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from chain_utils import Chain
from lattice_utils import DivisorClass, RationalClass, hyperplane, pair
from surface_builder import (
    BuilderError,
    ChainCheckError,
    add_curve,
    assert_equal_class,
    begin_plane,
    blow_up,
    chain_check,
    check_disjoint,
    combination_class,
    declare_chain,
    replay,
    resolve_symbol,
)


def nodal_cubic():
    s = add_curve(begin_plane(), "F", hyperplane(1) * 3)
    for i in range(1, 10):
        s = blow_up(s, f"e{i}", {"F": 1})
    return blow_up(s, "E", {"F": 2})


def test_begin_plane():
    s = begin_plane()
    assert s.lattice_rank == 1
    assert s.ksq() == 9
    assert s.curves == {}


def test_blow_up_updates_classes():
    s = add_curve(begin_plane(), "L", hyperplane(1))
    s = blow_up(s, "e1", {"L": 1})
    assert s.lattice_rank == 2
    assert s.curve("L") == DivisorClass((1, -1))
    assert s.curve("e1") == DivisorClass((0, 1))
    assert s.ksq() == 8
    # 旧状态不变
    assert s.history[0].name == "L"


def test_blow_up_errors():
    s = add_curve(begin_plane(), "L", hyperplane(1))
    with pytest.raises(BuilderError):
        blow_up(s, "e1", {"M": 1})
    with pytest.raises(BuilderError):
        blow_up(s, "L", {})
    with pytest.raises(BuilderError):
        blow_up(s, "e1", {"L": 0})


def test_blow_up_at_empty_point():
    s = blow_up(begin_plane(), "e1", {})
    assert s.curve("e1") == DivisorClass((0, 1))


def test_resolve_symbols():
    s = add_curve(begin_plane(), "L", hyperplane(1))
    s = blow_up(s, "e1", {"L": 1})
    s = blow_up(s, "e2", {"e1": 1})
    assert resolve_symbol(s, "h") == DivisorClass((1, 0, 0))
    assert resolve_symbol(s, "K") == DivisorClass((-3, 1, 1))
    assert resolve_symbol(s, "@e1") == DivisorClass((0, 1, 0))
    assert resolve_symbol(s, "e1") == DivisorClass((0, 1, -1))
    with pytest.raises(BuilderError):
        resolve_symbol(s, "@L")


def test_combination_class_kinds():
    s = nodal_cubic()
    integral = combination_class(s, [(1, "F"), (2, "E")])
    assert isinstance(integral, DivisorClass)
    rational = combination_class(s, [(Fraction(1, 2), "F")])
    assert isinstance(rational, RationalClass)
    assert assert_equal_class(s, [(1, "K")], [(-1, "F"), (-1, "E")])
    assert not assert_equal_class(s, [(1, "K")], [(-1, "F")])


def test_nodal_chain():
    s = declare_chain(nodal_cubic(), "C", ["F"])
    assert chain_check(s, "C") == Chain((4,))


def test_chain_check_reports_pair():
    s = begin_plane()
    for name in ("A", "B", "C"):
        s = add_curve(s, name, hyperplane(s.lattice_rank))
        for i in range(1, 4):
            s = blow_up(s, f"{name.lower()}{i}", {name: 1})
    s = declare_chain(s, "X", ["A", "B", "C"])
    with pytest.raises(ChainCheckError) as info:
        chain_check(s, "X")
    assert info.value.pair == ("A", "C")
    assert info.value.value == 1


def test_chain_check_self_intersection():
    s = add_curve(begin_plane(), "L", hyperplane(1))
    s = blow_up(s, "e1", {"L": 1})
    s = declare_chain(s, "X", ["L"])
    with pytest.raises(ChainCheckError) as info:
        chain_check(s, "X")
    assert info.value.value == 0


def test_declare_chain_errors():
    s = declare_chain(nodal_cubic(), "C", ["F"])
    with pytest.raises(BuilderError):
        declare_chain(s, "C", ["E"])
    with pytest.raises(BuilderError):
        declare_chain(s, "D", ["F"])
    with pytest.raises(BuilderError):
        declare_chain(s, "D", ["E", "E"])
    with pytest.raises(BuilderError):
        declare_chain(s, "D", [])


def test_check_disjoint():
    s = nodal_cubic()
    s = declare_chain(s, "C", ["F"])
    s = declare_chain(s, "D", ["e1"])
    with pytest.raises(ChainCheckError):
        check_disjoint(s, ["C", "D"])
    s = declare_chain(s, "G", ["e2"])
    check_disjoint(s, ["D", "G"])


def test_replay_reproduces_registry():
    s = nodal_cubic()
    again = replay(s.history)
    assert again.curves == s.curves
    assert again.basis_index == s.basis_index
    assert again.lattice_rank == s.lattice_rank


@st.composite
def blowup_scripts(draw):
    s = add_curve(begin_plane(), "C0", DivisorClass((draw(st.integers(1, 4)),)))
    for i in range(draw(st.integers(1, 8))):
        names = sorted(s.curves)
        chosen = draw(st.lists(st.sampled_from(names), unique=True, max_size=3))
        mults = {name: draw(st.integers(1, 2)) for name in chosen}
        s = blow_up(s, f"x{i}", mults)
    return s


@settings(max_examples=50, deadline=None)
@given(blowup_scripts())
def test_blow_up_invariants(s):
    n = s.n_blowups
    assert s.ksq() == 9 - n
    # h 与各例外曲线的当前类与标准基相差一个单位三角变换：格仍是幺模的
    basis = [hyperplane(s.lattice_rank)] + [s.curve(name) for name in s.basis_index]
    gram = sympy.Matrix([[pair(a, b) for b in basis] for a in basis])
    assert abs(gram.det()) == 1
    assert replay(s.history).curves == s.curves


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.lists(st.booleans(), min_size=1, max_size=6))
def test_each_blow_up_drops_ksq_by_one(degree, through):
    s = add_curve(begin_plane(), "C", DivisorClass((degree,)))
    for i, on_curve in enumerate(through):
        before = s.ksq()
        square = pair(s.curve("C"), s.curve("C"))
        s = blow_up(s, f"e{i}", {"C": 1} if on_curve else {})
        assert s.ksq() == before - 1
        assert pair(s.curve("C"), s.curve("C")) == square - (1 if on_curve else 0)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 4),
    st.integers(1, 4),
    st.lists(st.tuples(st.sampled_from(["A", "B", None]), st.integers(1, 2), st.booleans()), max_size=8),
)
def test_pairing_survives_separate_blow_ups(deg_a, deg_b, steps):
    s = add_curve(begin_plane(), "A", DivisorClass((deg_a,)))
    s = add_curve(s, "B", DivisorClass((deg_b,)))
    for i, (target, mult, on_previous) in enumerate(steps):
        # 中心只落在 A、B 之一上，可以同时落在上一条例外曲线上
        incidences = {target: mult} if target else {}
        if on_previous and i > 0:
            incidences[f"x{i - 1}"] = 1
        s = blow_up(s, f"x{i}", incidences)
        assert pair(s.curve("A"), s.curve("B")) == deg_a * deg_b
