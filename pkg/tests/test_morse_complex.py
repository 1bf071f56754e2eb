from __future__ import annotations

import random
from fractions import Fraction

import pytest

from morsecx.errors import BudgetExceeded, InfiniteCriticalSet, NotRayless
from morsecx.examples import NAMES, cylinder_rayless_matching, get_example, halfline_poset
from morsecx.homology import homology, simplicial_homology
from morsecx.incidence import compute_incidence
from morsecx.matching import build_matching, random_acyclic_matching
from morsecx.morse_complex import (GradientField, IntChain, chain_of, morse_complex, morse_differential,
                                   morse_differential_by_paths, pm_cell_counts, rayless_matching,
                                   stabilize_flow, synthesize_morse_function, verify_gradient_field,
                                   verify_morse_function)
from morsecx.poset import face_poset

from conftest import random_complex

RAYLESS = [n for n in NAMES if n != "bypass_ladder"]


def test_int_chain_arithmetic():
    a = chain_of("x", 1, 2) + chain_of("y", 1)
    b = chain_of("x", 1, -2)
    assert dict(a + b) == {"y": 1}
    assert dict(3 * a) == {"x": 6, "y": 3}
    assert not (a - a)
    assert dict((-a).restrict(lambda z: z == "x")) == {"x": -2}


def test_chains_are_homogeneous():
    with pytest.raises(ValueError):
        IntChain.build(face_poset(random_complex(random.Random(1))), {"0": 1, "0.1": 1})


def test_gradient_on_halfline():
    m = get_example("halfline_rayless").matching
    g = GradientField(m, compute_incidence(halfline_poset()))
    assert dict(g(("v", 2))) == {("e", 1): -1}
    assert not g(("v", 0))
    assert dict(stabilize_flow(g, ("v", 3))) == {("v", 0): 1}


def test_flow_budget_exceeded_on_a_ray():
    m = get_example("halfline_ray").matching
    g = GradientField(m, compute_incidence(m.poset))
    with pytest.raises(BudgetExceeded):
        stabilize_flow(g, ("v", 3), budget=20)


@pytest.mark.parametrize("name", RAYLESS)
def test_examples_match_expected_homology(name):
    ex = get_example(name)
    cx = morse_complex(ex.matching)
    h = homology(cx)
    assert list(h.betti) == ex.expected["betti"][:len(h.betti)]
    assert h == homology(morse_complex(ex.matching, method="paths"))
    if "generators" in ex.expected:
        assert list(cx.rank_vector()) == ex.expected["generators"][:len(cx.rank_vector())]
    if ex.complex is not None:
        assert h == simplicial_homology(ex.complex)


def test_line_complex_provenance():
    cx = morse_complex(get_example("line_two_ends").matching)
    assert cx.generators == {0: (("a", 1), ("b", 1)), 1: ("fb",)}
    assert cx.provenance["fb"] == {"origin": "critical"}
    assert cx.provenance[("a", 1)]["origin"] == "ray"
    assert cx.boundary(1).to_dense() == [[1], [-1]]


def test_cylinder_rayless_differential():
    cx = morse_complex(cylinder_rayless_matching())
    assert cx.boundary(1).to_dense() == [[1, 0, 1], [-1, 1, 0], [0, -1, -1]]
    assert homology(cx).betti == (1, 1)


def test_paths_equal_flow_on_random_instances(rng):
    for _ in range(30):
        p = face_poset(random_complex(rng))
        m = random_acyclic_matching(p, rng)
        inc = compute_incidence(p)
        g = GradientField(m, inc)
        for c in p.elements:
            if m.partner(c) is None:
                assert morse_differential(g, c) == morse_differential_by_paths(m, inc, c)


def test_infinite_critical_set():
    m = build_matching(halfline_poset(), selection=[("e", "v", 0, 0)], period=2)
    with pytest.raises(InfiniteCriticalSet):
        morse_complex(m)


@pytest.mark.parametrize("name", RAYLESS)
def test_gradient_field_checks(name):
    ex = get_example(name)
    m, _ = rayless_matching(ex.matching)
    rep = verify_gradient_field(GradientField(m, compute_incidence(m.poset)))
    assert rep.ok, rep.failures
    assert rep.checked > 0


def test_synthesis_spot_values():
    f = synthesize_morse_function(get_example("delta2_cone").matching)
    assert f("2.3") == Fraction(7, 4)
    assert f("1.2.3") == Fraction(3, 2)
    assert f("1") == 0
    assert f.lines()[:2] == ["1 0/1", "2 3/4"]


def test_synthesis_on_halfline():
    m = get_example("halfline_rayless").matching
    f = synthesize_morse_function(m, 3)
    assert f.lines() == ["v@0 0/1", "e@0 1/2", "v@1 3/4", "e@1 7/8", "v@2 15/16", "e@2 31/32", "v@3 63/64"]
    rep = verify_morse_function(f, m.poset, matching=m)
    assert rep.ok and rep.round_trip
    assert rep.critical == (("v", 0),)


def test_synthesis_needs_rayless():
    with pytest.raises(NotRayless):
        synthesize_morse_function(get_example("halfline_ray").matching)


def test_verify_detects_a_bad_function():
    p = face_poset(random_complex(random.Random(5)))
    bad = {x: Fraction(0) for x in p.elements}
    rep = verify_morse_function(bad, p)
    assert not rep.ok


def test_cell_counts():
    c = pm_cell_counts(get_example("cylinder").matching)
    assert c.critical == (0, 0, 0) and c.rays == (3, 3, 0)
    assert c.euler_characteristic == 0
    assert pm_cell_counts(get_example("line_two_ends").matching).total == (2, 1)


def test_opposite_sign_convention_is_not_nilpotent():
    # V(y) = -eps(x, y) x makes (1 - dV) y keep a 2y term, so the flow never dies
    class Negated(GradientField):
        def __call__(self, y):
            return -1 * super().__call__(y)

    m = get_example("halfline_rayless").matching
    assert not verify_gradient_field(Negated(m, compute_incidence(m.poset))).ok
    assert verify_gradient_field(GradientField(m, compute_incidence(m.poset))).ok
