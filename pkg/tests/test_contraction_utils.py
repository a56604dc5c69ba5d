from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from chain_utils import Chain, enumerate_T
from contraction_utils import (
    ContractionError,
    chain_matrix,
    contract_chain,
    determinant,
    discrepancies,
    is_negative_definite,
    ksq_singular,
    leading_minors,
    nef_report,
    pullback_canonical,
    solve_exact,
)
from lattice_utils import DivisorClass, canonical, hyperplane, pair
from surface_builder import add_curve, begin_plane, blow_up, declare_chain


def realize_chain(bs):
    """
    在 ⟨1⟩ ⊕ N⟨−1⟩ 里实现一条链：Gᵢ = e_{i} − e_{i+1} − (bᵢ − 2) 个额外基向量。
    相邻配对为 1，自交为 −bᵢ，K·Gᵢ = bᵢ − 2。
    """
    n = len(bs)
    extra = sum(b - 2 for b in bs)
    rank = 1 + (n + 1) + extra
    classes = []
    next_free = 1 + n + 1
    for i, b in enumerate(bs):
        coeffs = [0] * rank
        coeffs[1 + i] = 1
        coeffs[2 + i] = -1
        for _ in range(b - 2):
            coeffs[next_free] = -1
            next_free += 1
        classes.append(DivisorClass(tuple(coeffs)))
    return classes, canonical(rank - 1)


def test_realize_chain_matrix():
    classes, k = realize_chain((5, 2))
    assert chain_matrix(classes) == [[-5, 1], [1, -2]]
    assert [pair(k, g) for g in classes] == [3, 0]


def test_determinant_and_minors():
    assert determinant([[2, 1], [1, 2]]) == 3
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0
    assert determinant([]) == 1
    assert leading_minors([[-2, 1], [1, -2]]) == [-2, 3]


def test_is_negative_definite():
    assert is_negative_definite([[-2, 1], [1, -2]])
    assert not is_negative_definite([[-1, 1], [1, -1]])
    assert not is_negative_definite([[1]])
    with pytest.raises(ContractionError):
        is_negative_definite([[-2, 1], [0, -2]])


def test_solve_exact_singular():
    with pytest.raises(ContractionError):
        solve_exact([[1, 2], [2, 4]], [1, 1])


def test_golden_discrepancies():
    classes, k = realize_chain((2, 10, 2, 2, 2, 2, 2, 3))
    assert discrepancies(classes, k) == [Fraction(n, 15) for n in (7, 14, 13, 12, 11, 10, 9, 8)]
    classes, k = realize_chain((2, 7, 2, 2, 3))
    assert discrepancies(classes, k) == [Fraction(n, 9) for n in (4, 8, 7, 6, 5)]
    classes, k = realize_chain((7, 2, 2, 2))
    assert discrepancies(classes, k) == [Fraction(n, 5) for n in (4, 3, 2, 1)]
    classes, k = realize_chain((4,))
    assert discrepancies(classes, k) == [Fraction(1, 2)]
    classes, k = realize_chain((5, 2))
    assert discrepancies(classes, k) == [Fraction(2, 3), Fraction(1, 3)]


def test_rdp_discrepancies_vanish():
    for n in range(1, 7):
        classes, k = realize_chain((2,) * n)
        assert discrepancies(classes, k) == [0] * n


def test_discrepancies_need_negative_definite():
    with pytest.raises(ContractionError):
        discrepancies([hyperplane(2)], canonical(1))


def test_class_T_discrepancies_in_open_interval():
    for chain in enumerate_T(10, 12):
        classes, k = realize_chain(chain.bs)
        assert is_negative_definite(chain_matrix(classes))
        ds = discrepancies(classes, k)
        assert all(0 < d < 1 for d in ds), chain
        if chain.bs == chain.bs[::-1]:
            assert ds == ds[::-1]


def test_discrepancies_agree_with_sympy():
    for chain in enumerate_T(6, 9):
        classes, k = realize_chain(chain.bs)
        m = sympy.Matrix(chain_matrix(classes))
        rhs = sympy.Matrix([-pair(k, g) for g in classes])
        oracle = m.LUsolve(rhs)
        ours = discrepancies(classes, k)
        assert [sympy.Rational(d.numerator, d.denominator) for d in ours] == list(oracle)


square = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)
)


@settings(max_examples=100, deadline=None)
@given(square)
def test_determinant_matches_sympy(rows):
    assert determinant(rows) == sympy.Matrix(rows).det()


@settings(max_examples=100, deadline=None)
@given(square, st.lists(st.integers(-9, 9), min_size=5, max_size=5))
def test_solve_exact_matches_sympy(rows, rhs):
    n = len(rows)
    m = sympy.Matrix(rows)
    if m.det() == 0:
        return
    ours = solve_exact(rows, rhs[:n])
    oracle = m.LUsolve(sympy.Matrix(rhs[:n]))
    assert [sympy.Rational(x.numerator, x.denominator) for x in ours] == list(oracle)


def nodal_surface():
    s = add_curve(begin_plane(), "F", hyperplane(1) * 3)
    for i in range(1, 10):
        s = blow_up(s, f"e{i}", {"F": 1})
    s = blow_up(s, "E", {"F": 2})
    return declare_chain(s, "C", ["F"])


def test_nodal_pullback_and_nef():
    s = nodal_surface()
    pullback = pullback_canonical(s, {"C": ("F",)})
    assert pair(pullback, s.curve("F")) == 0
    assert ksq_singular(pullback) == 0
    report = nef_report(s, {"C": ("F",)}, pullback)
    values = dict(report.nef_table)
    assert values["e1"] == Fraction(-1, 2)
    assert values["E"] == 0
    assert not report.nef
    assert report.discrepancy_of("C") == (Fraction(1, 2),)
    with pytest.raises(ContractionError):
        report.discrepancy_of("D")


def test_contract_chain_record():
    entry = contract_chain(nodal_surface(), "C")
    assert entry.chain == Chain((4,))
    assert entry.class_t
    assert entry.negative_definite
    assert entry.cpq.params.p == 2
    assert [str(t) for t in entry.tparams] == ["(1,2,1)"]
