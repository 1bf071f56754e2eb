from __future__ import annotations

import random

import pytest

from morsecx.examples import NAMES, cylinder_poset, get_example, halfline_poset, line_poset
from morsecx.incidence import IncidenceMap, check_local, compute_incidence
from morsecx.errors import UnknownElement
from morsecx.poset import face_poset

from conftest import random_complex


def _check_all(poset, elements):
    inc = compute_incidence(poset)
    for x in elements:
        if poset.degree(x) >= 1:
            assert check_local(poset, inc, x), x
    return inc


@pytest.mark.parametrize("name", NAMES)
def test_boundary_squares_to_zero_on_examples(name):
    ex = get_example(name)
    p = ex.poset
    _check_all(p, p.window(p.start + 6) if p.is_periodic else p.elements)


def test_random_face_posets(rng):
    for _ in range(25):
        p = face_poset(random_complex(rng))
        _check_all(p, p.elements)


def test_signs_are_shift_invariant():
    p = cylinder_poset()
    inc = compute_incidence(p)
    for row in range(3, 9):
        for q in ("f0", "f1", "h2", "u1"):
            x = (q, row)
            for y in p.covered_by(x):
                assert inc(x, y) == inc((q, row + 1), (y[0], y[1] + 1))


def test_degree_one_augmentation():
    p = line_poset()
    inc = compute_incidence(p)
    assert inc("fa", "c") + inc("fa", ("a", 1)) == 0
    assert inc(("ea", 5), ("a", 5)) == -inc(("ea", 5), ("a", 6))


def test_halfline_first_sign_positive():
    inc = compute_incidence(halfline_poset())
    # the first free sign in canonical order is taken to be +1
    assert inc(("e", 0), ("v", 0)) == 1
    assert inc(("e", 0), ("v", 1)) == -1


def test_missing_sign():
    with pytest.raises(UnknownElement):
        IncidenceMap()("a", "b")


def test_as_dict_is_stable():
    p = line_poset()
    assert compute_incidence(p).as_dict() == compute_incidence(p).as_dict()


def test_random_seeds_do_not_matter():
    # signs depend only on the poset, not on global random state
    p = face_poset(random_complex(random.Random(3)))
    random.seed(1)
    a = compute_incidence(p).as_dict()
    random.seed(2)
    assert compute_incidence(p).as_dict() == a
