from __future__ import annotations

import pytest

from morsecx.errors import HasBypass, InvalidRay, MultirayPresent, NotNormalized
from morsecx.examples import get_example
from morsecx.matching import build_matching, critical_cells, is_acyclic, is_rayless
from morsecx.poset import build_pattern, build_periodic_poset
from morsecx.rays import (Ray, are_equivalent, bypass_free_representative, enumerate_rays, find_bypass,
                          is_multiray, is_normalized, make_rayless, ray_degree, reverse_ray, same_tail,
                          validate_ray)


def crossed():
    """Two half-lines whose edges alternate between the cell types a and b."""
    pat = build_pattern([("a", 0), ("b", 0), ("ea", 1), ("eb", 1)],
                        [("ea", "a", 0), ("ea", "b", 1), ("eb", "b", 0), ("eb", "a", 1)])
    return build_matching(build_periodic_poset(pat), selection=[("ea", "a", 0), ("eb", "b", 0)])


def parallel():
    pat = build_pattern([("a", 0), ("ea", 1), ("b", 0), ("eb", 1)],
                        [("ea", "a", 0), ("ea", "a", 1), ("eb", "b", 0), ("eb", "b", 1)])
    return build_matching(build_periodic_poset(pat), selection=[("ea", "a", 0), ("eb", "b", 0)])


def test_halfline_has_one_class():
    m = get_example("halfline_ray").matching
    cl = enumerate_rays(m)
    assert cl.counts() == (1,)
    r = cl.classes[0]
    assert r.encoding() == "ray cycle v@0 e@0 v@1; phase 0"
    assert r.elements(5) == [("v", 0), ("e", 0), ("v", 1), ("e", 1), ("v", 2)]
    assert is_normalized(m, r)


def test_rayless_matching_has_no_classes():
    assert len(enumerate_rays(get_example("halfline_rayless").matching)) == 0
    assert len(enumerate_rays(get_example("rp2").matching)) == 0


def test_cylinder_classes():
    m = get_example("cylinder").matching
    cl = enumerate_rays(m)
    assert cl.counts() == (3, 3)
    assert [r.encoding() for r in cl.classes[:1]] == ["ray cycle v0@0 u0@0 v0@1; phase 0"]
    assert ray_degree(m, cl.classes[3]) == (1, 0)


def test_parallel_half_lines():
    cl = enumerate_rays(parallel())
    assert [r.encoding() for r in cl.classes] == ["ray cycle a@0 ea@0 a@1; phase 0",
                                                  "ray cycle b@0 eb@0 b@1; phase 0"]


def test_shift_two_cycle_splits_by_phase():
    m = crossed()
    cl = enumerate_rays(m)
    assert [r.encoding() for r in cl.classes] == ["ray cycle a@0 ea@0 b@1 eb@1 a@2; phase 0",
                                                  "ray cycle a@0 ea@0 b@1 eb@1 a@2; phase 1"]
    r0, r1 = cl.classes
    assert not are_equivalent(m, r0, r1)
    assert are_equivalent(m, r0, r0.advanced(3))


def test_validate_rejects_non_paths():
    m = get_example("halfline_ray").matching
    with pytest.raises(InvalidRay):
        validate_ray(m, Ray((("v", 0), ("e", 0)), 1, 0, (("e", 0),)))
    with pytest.raises(InvalidRay):
        validate_ray(m, Ray((("e", 0), ("v", 0)), 1, 0))
    with pytest.raises(InvalidRay):
        validate_ray(get_example("rp2").matching, Ray((("v", 0),), 1, 0))


def test_degree_and_normalization():
    m = get_example("halfline_ray").matching
    r = Ray((("e", 0), ("v", 1)), 1, 0)
    assert not is_normalized(m, r)
    i0, j0, n = ray_degree(m, r, normalize=True)
    assert (i0, j0) == (0, 1)
    assert n.element(0) == ("v", 1) and is_normalized(m, n)
    with pytest.raises(NotNormalized):
        reverse_ray(m, r)


def test_equivalence_with_stem():
    m = get_example("halfline_ray").matching
    r = enumerate_rays(m).classes[0]
    s = Ray((("v", 0), ("e", 0)), 1, 3, (("v", 2), ("e", 2)))
    assert same_tail(r, s)
    assert are_equivalent(m, r, s)
    cyl = get_example("cylinder").matching
    a, b = enumerate_rays(cyl).classes[:2]
    assert not are_equivalent(cyl, a, b)


def test_bypass_free_rays():
    m = get_example("cylinder").matching
    for r in enumerate_rays(m).classes:
        assert find_bypass(m, r, 6) is None
        assert is_multiray(m, r) == (False, None)


def test_ladder_multiray_certificate():
    m = get_example("bypass_ladder").matching
    cl = enumerate_rays(m)
    cert = cl.multiray
    assert cert is not None
    assert cert.ray.encoding().startswith("ray cycle e@0 f@0 e@1;")
    assert [q for q, _ in cert.bypass.path] == ["f", "ea", "G", "e"]
    # the recurrence is the bypass moved one shift along the ray
    assert cert.recurrence.path == tuple((q, i + cert.ray.shift) for q, i in cert.bypass.path)
    assert "2^aleph_0" in cert.message
    ok, again = is_multiray(m, cert.ray)
    assert ok and again.bypass == cert.bypass


def test_reversal_refuses_bypassed_ray():
    m = get_example("bypass_ladder").matching
    r = enumerate_rays(m).multiray.ray
    with pytest.raises(HasBypass):
        reverse_ray(m, r)
    with pytest.raises(MultirayPresent):
        make_rayless(m)


def test_halfline_reversal():
    m = get_example("halfline_ray").matching
    r = enumerate_rays(m).classes[0]
    new = reverse_ray(m, r)
    assert is_acyclic(new).acyclic
    assert is_rayless(new).rayless
    assert critical_cells(new).elements == (("v", 0),)
    assert new.partner(("e", 0)) == ("v", 1)
    assert new.partner(("e", 7)) == ("v", 8)


def test_line_reversal_sequence():
    m = get_example("line_two_ends").matching
    new, steps = make_rayless(m)
    assert [s.critical for s in steps] == [("a", 1), ("b", 1)]
    assert critical_cells(new).counts() == (2, 1)
    assert is_rayless(new).rayless


def test_cylinder_reversal_makes_row_zero_critical():
    m = get_example("cylinder").matching
    new, steps = make_rayless(m)
    assert len(steps) == 6
    assert sorted(critical_cells(new).elements) == sorted(
        [(f"v{j}", 0) for j in range(3)] + [(f"h{j}", 0) for j in range(3)])


def test_shift_two_reversal_doubles_period():
    new, steps = make_rayless(crossed())
    assert new.period == 2
    assert [s.critical for s in steps] == [("a", 0), ("b", 0)]
    assert critical_cells(new).finite


def test_representative_skips_bypasses():
    m = get_example("halfline_ray").matching
    r = enumerate_rays(m).classes[0]
    assert bypass_free_representative(m, r) == r
