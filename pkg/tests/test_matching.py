from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from morsecx.errors import BudgetExceeded, NotACover, NotAcyclic, Overlap
from morsecx.examples import (cylinder_poset, cylinder_rayless_matching, get_example, halfline_poset,
                              line_poset)
from morsecx.matching import (build_matching, critical_cells, descent_digraph, greedy_collapse_matching,
                              is_acyclic, is_rayless, l_M, m_plus, modified_hasse_out, quotient_components,
                              random_acyclic_matching, seam_rows)
from morsecx.poset import face_poset
from morsecx.simplicial import SimplicialComplex

from conftest import random_complex

TRIANGLE = face_poset(SimplicialComplex.from_facets([(1, 2), (2, 3), (1, 3)]))


def test_matched_arrow_is_reversed():
    m = build_matching(TRIANGLE, [("1.2", "1")])
    assert modified_hasse_out(m, "1") == ("1.2",)
    assert modified_hasse_out(m, "1.2") == ("2",)
    assert m_plus(m, "1") == ("2",)


def test_cyclic_matching_has_witness():
    m = build_matching(TRIANGLE, [("1.2", "1"), ("2.3", "2"), ("1.3", "3")])
    v = is_acyclic(m)
    assert not v.acyclic
    assert set(v.witness) == set(TRIANGLE.elements)


def test_not_a_cover_and_overlap():
    with pytest.raises(NotACover):
        build_matching(TRIANGLE, [("1.2", "3")])
    with pytest.raises(Overlap):
        build_matching(TRIANGLE, [("1.2", "1"), ("1.3", "1")])


def test_selection_must_use_pattern_arcs():
    with pytest.raises(NotACover):
        build_matching(halfline_poset(), selection=[("e", "v", -1)])
    with pytest.raises(Overlap):
        build_matching(halfline_poset(), selection=[("e", "v", 0), ("e", "v", 1)])


def test_tail_pairs_need_a_selection():
    with pytest.raises(NotACover):
        build_matching(halfline_poset(), [(("e", 3), ("v", 3))])


def test_seam_collision_rejected():
    p = line_poset()
    with pytest.raises(Overlap):
        build_matching(p, [("fa", ("a", 1))], [("ea", "a", 0)])


def test_mates_in_the_tail():
    m = get_example("halfline_rayless").matching
    assert m.up_mate(("v", 5)) == ("e", 4)
    assert m.down_mate(("e", 4)) == ("v", 5)
    assert m.partner(("v", 0)) is None
    assert m.is_critical(("v", 0))


def test_period_two_selection_phases():
    m = build_matching(halfline_poset(), selection=[("e", "v", 0, 0)], period=2)
    assert m.partner(("e", 4)) == ("v", 4)
    assert m.partner(("e", 5)) is None
    rep = critical_cells(m)
    assert not rep.finite
    assert rep.markers == (("v", 1), ("e", 1))
    assert rep.from_row == 1


def test_critical_cells_finite_examples():
    assert critical_cells(get_example("halfline_rayless").matching).as_dict()["by_degree"] == {"0": ["v@0"]}
    rep = critical_cells(cylinder_rayless_matching())
    assert rep.counts() == (3, 3)
    assert rep.elements[0] == ("v0", 0)
    assert critical_cells(get_example("line_two_ends").matching).counts() == (0, 1)


def test_periodic_zero_cycle_detected():
    m = build_matching(cylinder_poset(), selection=[(f"h{j}", f"v{j}", 0) for j in range(3)])
    v = is_acyclic(m)
    assert not v.acyclic
    assert v.witness == (("v0", 0), ("h0", 0), ("v1", 0), ("h1", 0), ("v2", 0), ("h2", 0))
    assert v.window_rows == seam_rows(m) == 170


def test_quotient_components_signs():
    comps = quotient_components(get_example("cylinder").matching)
    assert len(comps) == 6
    assert all(c["sign"] == 1 for c in comps)
    assert not any(c["sign"] > 0 for c in quotient_components(cylinder_rayless_matching()))


def test_rayless_verdicts():
    assert is_rayless(get_example("halfline_rayless").matching).rayless
    v = is_rayless(get_example("halfline_ray").matching)
    assert not v.rayless
    assert v.as_dict()["witness"]["unrolled"][:3] == ["v@3", "e@3", "v@4"]
    assert is_rayless(get_example("torus7").matching).rayless


def test_descent_lengths():
    m = get_example("halfline_rayless").matching
    assert [l_M(m, ("v", k)) for k in range(5)] == [0, 1, 2, 3, 4]
    assert len(descent_digraph(m, ("v", 4))) == 5
    lm = [l_M(cylinder_rayless_matching(), (q, 2)) for q in ("v0", "h0", "u0", "f0")]
    assert lm == [2, 2, 0, 0]


def test_descent_budget_on_a_ray():
    m = get_example("halfline_ray").matching
    with pytest.raises(BudgetExceeded):
        descent_digraph(m, ("v", 0), step_budget=50)


def test_l_m_rejects_cycles():
    m = build_matching(TRIANGLE, [("1.2", "1"), ("2.3", "2"), ("1.3", "3")])
    with pytest.raises(NotAcyclic):
        l_M(m, "1")


def test_greedy_matching_is_acyclic():
    for name in ("rp2", "torus7", "s2_tetra"):
        m = greedy_collapse_matching(get_example(name).poset)
        assert is_acyclic(m).acyclic


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_random_matchings_are_acyclic(seed):
    rng = random.Random(seed)
    p = face_poset(random_complex(rng))
    m = random_acyclic_matching(p, rng)
    assert is_acyclic(m).acyclic
    used = [z for pair in m.pairs for z in pair]
    assert len(used) == len(set(used))
