from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from morsecx.errors import NotAComplex, SideConditionViolated
from morsecx.examples import RP2_FACETS, torus7_facets
from morsecx.homology import (FiniteChainComplex, HomologyGroups, IntegerMatrix, determinant, homology,
                              invariant_factors, morse_inequalities, simplicial_homology, smith_normal_form)
from morsecx.simplicial import SimplicialComplex

from conftest import cylinder_truncation, line_truncation, path_complex


def test_snf_small():
    A = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    snf = smith_normal_form(A)
    assert snf.divisors == [2, 6, 12]
    assert (snf.U @ snf.D @ snf.V).to_dense() == A
    assert abs(determinant(snf.U)) == 1 and abs(determinant(snf.V)) == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=1, max_size=5))
def test_snf_factorization(rows):
    snf = smith_normal_form(rows)
    assert (snf.U @ snf.D @ snf.V).to_dense() == rows
    d = snf.divisors
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    assert snf.D.entries.keys() <= {(i, i) for i in range(len(rows))}
    assert invariant_factors(IntegerMatrix.from_dense(rows)) == d


@pytest.mark.parametrize("backend", ["numba", "numpy", "exact"])
def test_backends_agree(backend):
    rng = random.Random(7)
    for _ in range(20):
        rows = [[rng.randint(-5, 5) for _ in range(6)] for _ in range(5)]
        assert invariant_factors(IntegerMatrix.from_dense(rows), backend) == smith_normal_form(rows).divisors


def test_overflow_falls_back_to_exact():
    big = 1 << 40
    rows = [[big, 1], [3, big]]
    assert invariant_factors(IntegerMatrix.from_dense(rows), "numpy") == smith_normal_form(rows).divisors


def test_determinant():
    assert determinant(IntegerMatrix.from_dense([[2, 1], [7, 4]])) == 1
    assert determinant(IntegerMatrix.from_dense([[0, 1, 2], [1, 0, 3], [4, -3, 8]])) == -2


def test_rp2_and_torus():
    rp2 = simplicial_homology(SimplicialComplex.from_facets(RP2_FACETS))
    assert rp2 == HomologyGroups.of([1, 0, 0], {1: [2]})
    assert rp2.group(1) == "Z/2"
    torus = simplicial_homology(SimplicialComplex.from_facets(torus7_facets()))
    assert torus.betti == (1, 2, 1) and not any(torus.torsion)
    assert torus.group(1) == "Z^2"


def test_truncations():
    assert simplicial_homology(path_complex(50)).betti == (1,)
    assert simplicial_homology(line_truncation(50)).betti == (1,)
    assert simplicial_homology(cylinder_truncation(50)).betti == (1, 1)


def test_sphere():
    s2 = SimplicialComplex.from_facets([(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)])
    h = simplicial_homology(s2)
    assert h.betti == (1, 0, 1)
    assert h.euler_characteristic() == 2
    assert str(h) == "H_0 = Z\nH_1 = 0\nH_2 = Z"


def test_not_a_complex():
    gens = {0: ("a",), 1: ("e",), 2: ("t",)}
    bds = {1: IntegerMatrix.from_dense([[1]]), 2: IntegerMatrix.from_dense([[1]])}
    with pytest.raises(NotAComplex):
        FiniteChainComplex(gens, bds).check()


def test_shape_checked():
    with pytest.raises(ValueError):
        FiniteChainComplex({0: ("a",), 1: ("e",)}, {1: IntegerMatrix(2, 1)})


def test_torsion_validation():
    with pytest.raises(ValueError):
        HomologyGroups((1,), ((3, 2),))


def test_inequalities_pass_for_a_consistent_input():
    rep = morse_inequalities([1, 1, 1], [0, 0, 0], [1, 0, 0])
    assert rep.weak == (True, True, True)
    assert rep.strong == (True, True, True)
    assert rep.euler is True
    assert rep.consistent


def test_inconsistent_input_flagged():
    rep = morse_inequalities([1, 0], [1, 0], [1, 0])
    assert rep.weak == (True, True)
    assert rep.strong[0] is True
    assert rep.strong[1] is False
    assert rep.euler is False
    assert not rep.consistent


def test_infinite_counts_skip_checks():
    rep = morse_inequalities([1, float("inf")], [0, 0], [1, 1])
    assert rep.strong[1] is None and rep.euler is None
    assert rep.side_conditions
    with pytest.raises(SideConditionViolated):
        morse_inequalities([1, None], [0, 0], [1, 1], strict=True)


def test_homology_of_explicit_complex():
    # a circle with one vertex and one loop edge
    cx = FiniteChainComplex({0: ("v",), 1: ("e",)}, {1: IntegerMatrix(1, 1)})
    assert homology(cx).betti == (1, 1)
