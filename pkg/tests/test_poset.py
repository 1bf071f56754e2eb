from __future__ import annotations

import pytest

from morsecx.errors import CycleInCovers, DanglingGlue, NotGraded, UnknownElement
from morsecx.examples import cylinder_poset, halfline_poset, line_poset
from morsecx.homology import simplicial_homology
from morsecx.poset import (build_finite_poset, build_pattern, build_periodic_poset, chains, down_set,
                           face_poset, format_elem, is_cellular, is_h_admissible, order_complex, parse_elem)
from morsecx.simplicial import SimplicialComplex


def interval():
    return build_finite_poset(["a", "b", "e"], [("e", "a"), ("e", "b")])


def test_finite_degrees_and_covers():
    p = interval()
    assert [p.degree(x) for x in "abe"] == [0, 0, 1]
    assert p.covered_by("e") == ("a", "b")
    assert p.covering("a") == ("e",)
    assert p.max_degree == 1
    assert p.by_degree() == {0: ("a", "b"), 1: ("e",)}


def test_cycle_in_covers_rejected():
    with pytest.raises(CycleInCovers):
        build_finite_poset(["x", "y"], [("x", "y"), ("y", "x")])


def test_ungraded_rejected():
    # t covers both a vertex and an edge
    with pytest.raises(NotGraded):
        build_finite_poset(["a", "b", "e", "t"], [("e", "a"), ("e", "b"), ("t", "e"), ("t", "a")])


def test_declared_degree_checked():
    with pytest.raises(NotGraded):
        build_finite_poset(["a", "e"], [("e", "a")], {"a": 0, "e": 2})


def test_unknown_element():
    p = interval()
    with pytest.raises(UnknownElement):
        p.degree("zz")
    with pytest.raises(UnknownElement):
        build_finite_poset(["a"], [("b", "a")])


def test_element_text_round_trip():
    for x in ["c", ("v", 3), ("h0", 12)]:
        assert parse_elem(format_elem(x)) == x
    assert format_elem(("v", 3)) == "v@3"


def test_halfline_structure():
    p = halfline_poset()
    assert p.start == 0
    assert p.covered_by(("e", 4)) == (("v", 4), ("v", 5))
    assert p.covering(("v", 4)) == (("e", 3), ("e", 4))
    assert p.covering(("v", 0)) == (("e", 0),)
    assert ("v", -1) not in p
    assert p.window(2) == (("v", 0), ("e", 0), ("v", 1), ("e", 1), ("v", 2))


def test_window_is_down_closed():
    p = cylinder_poset()
    w = set(p.window(4))
    for x in w:
        assert set(p.covered_by(x)) <= w


def test_line_prefix_and_glue():
    p = line_poset()
    assert p.degree("c") == 0 and p.degree("fa") == 1
    assert p.covered_by("fa") == ("c", ("a", 1))
    assert "fa" in p.covering(("a", 1))
    # row 0 of the tail is not part of the poset
    assert ("a", 0) not in p


def test_unroll_preserves_identities():
    p = line_poset()
    q = p.unroll(2)
    assert q.start == 3
    assert ("a", 1) in q.prefix and ("b", 2) in q.prefix
    for x in p.window(6):
        assert x in q
        assert q.degree(x) == p.degree(x)
        assert set(q.covered_by(x)) == set(p.covered_by(x))
        assert set(q.covering(x)) == set(p.covering(x))


def test_dangling_glue():
    pat = build_pattern([("v", 0), ("e", 1)], [("e", "v", 0), ("e", "v", 1)])
    with pytest.raises(DanglingGlue):
        build_periodic_poset(pat, ["c", "f"], prefix_covers=[("f", "c")], glue=[("f", ("v", 3))], start=1)
    with pytest.raises(DanglingGlue):
        build_periodic_poset(pat, ["c", "f"], prefix_covers=[("f", "c")], glue=[("f", ("w", 1))], start=1)


def test_pattern_shift_range():
    with pytest.raises(NotGraded):
        build_pattern([("v", 0), ("e", 1)], [("e", "v", 2)])


def test_face_poset_matches_f_vector():
    sc = SimplicialComplex.from_facets([(1, 2, 3), (3, 4)])
    p = face_poset(sc)
    assert [len(p.by_degree()[d]) for d in range(3)] == list(sc.f_vector())
    assert p.covered_by("1.2.3") == ("1.2", "1.3", "2.3")


def test_order_complex_of_face_poset_is_subdivision():
    sc = SimplicialComplex.from_facets([(1, 2, 3), (1, 3, 4), (2, 3, 4), (1, 2, 4)])
    sd = order_complex(face_poset(sc))
    assert simplicial_homology(sd) == simplicial_homology(sc)
    assert sd.f_vector() == (14, 36, 24)


def test_chains_and_down_set():
    p = face_poset(SimplicialComplex.from_facets([(1, 2, 3)]))
    d = down_set(p, "1.2")
    assert set(d.elements) == {"1", "2", "1.2"}
    assert len([c for c in chains(p) if len(c) == 3]) == 6


def test_face_posets_are_cellular():
    p = face_poset(SimplicialComplex.from_facets([(1, 2, 3), (2, 3, 4)]))
    assert is_cellular(p).ok
    assert is_h_admissible(p).ok


def test_non_cellular_poset_flagged():
    # a 2-cell whose boundary is a single arc, not a circle
    p = build_finite_poset(["a", "b", "e", "t"], [("e", "a"), ("e", "b"), ("t", "e")])
    rep = is_cellular(p)
    assert not rep.ok
    assert rep.failures[0][0] == "t"


def test_periodic_cellularity_is_windowed():
    rep = is_cellular(cylinder_poset())
    assert rep.ok
    assert "shift invariance" in rep.assumption
    assert is_h_admissible(halfline_poset()).ok
