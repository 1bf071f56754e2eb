"""Incidence signs making the cellular boundary square to zero."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import NoConsistentSigns, UnknownElement
from .poset import format_elem, is_tail_ref


@dataclass(frozen=True)
class IncidenceMap:
    """Signs ``sign(x, y)`` in {-1, +1} for every cover ``x > y``.

    Explicit values win; otherwise a cover between two tail elements (rows at
    or beyond ``tail_start``) takes the sign of its pattern arc, which is what
    makes the map shift invariant.
    """

    explicit: Mapping = field(default_factory=dict)
    arc_signs: Mapping = field(default_factory=dict)
    tail_start: int | None = None

    def sign(self, x, y) -> int:
        s = self.explicit.get((x, y))
        if s is not None:
            return s
        if (self.tail_start is not None and is_tail_ref(x) and is_tail_ref(y)
                and x[1] >= self.tail_start and y[1] >= self.tail_start):
            s = self.arc_signs.get((x[0], y[0], y[1] - x[1]))
            if s is not None:
                return s
        raise UnknownElement(f"no incidence sign for {format_elem(x)} > {format_elem(y)}")

    __call__ = sign

    def as_dict(self) -> dict:
        return {
            "explicit": [[format_elem(x), format_elem(y), s] for (x, y), s in self.explicit.items()],
            "arcs": [[u, v, d, s] for (u, v, d), s in sorted(self.arc_signs.items())],
            "tail_start": self.tail_start,
        }


def _solve_local(x, faces, deg, known, fixed: dict):
    """Signs on the covers of ``x``; ``known(y, z)`` gives lower signs.

    ``fixed`` maps some faces to predetermined signs. Returns the
    lexicographically first solution with +1 tried before -1, or None.
    """
    free = [y for y in faces if y not in fixed]
    pos = {y: i for i, y in enumerate(free)}
    constraints = []
    if deg == 1:
        constraints.append([(y, 1) for y in faces])
    below: dict = {}
    for y in faces:
        for z, s in known(y):
            below.setdefault(z, []).append((y, s))
    constraints.extend(below[z] for z in below)
    # for each free variable, the constraints that become fully assigned at it
    last_at: dict = {i: [] for i in range(len(free))}
    pre = []
    for c in constraints:
        idx = [pos[y] for y, _ in c if y in pos]
        if idx:
            last_at[max(idx)].append(c)
        else:
            pre.append(c)
    for c in pre:
        if sum(s * fixed[y] for y, s in c) != 0:
            return None
    values = dict(fixed)

    def ok(c):
        return sum(s * values[y] for y, s in c) == 0

    def go(i):
        if i == len(free):
            return True
        y = free[i]
        for v in (1, -1):
            values[y] = v
            if all(ok(c) for c in last_at[i]) and go(i + 1):
                return True
        del values[y]
        return False

    return {y: values[y] for y in faces} if go(0) else None


def _solve_finite(poset, elements, signs: dict, lookup):
    for x in sorted(elements, key=lambda e: (poset.degree(e), poset.order_key(e))):
        deg = poset.degree(x)
        faces = poset.covered_by(x)
        if not faces:
            continue

        def known(y):
            return [(z, lookup(y, z)) for z in poset.covered_by(y)]

        sol = _solve_local(x, faces, deg, known, {})
        if sol is None:
            raise NoConsistentSigns(f"no sign choice on the faces of {format_elem(x)} squares the boundary to zero")
        for y, s in sol.items():
            signs[(x, y)] = s


def compute_incidence(poset) -> IncidenceMap:
    """Deterministic sign assignment; the first free sign in canonical order is +1."""
    if not poset.is_periodic:
        signs: dict = {}
        _solve_finite(poset, poset.elements, signs, lambda a, b: signs[(a, b)])
        return IncidenceMap(signs)

    pattern = poset.pattern
    start = poset.start
    arc_signs: dict = {}
    generic = start + 3

    def arc_lookup(a, b):
        return arc_signs[(a[0], b[0], b[1] - a[1])]

    qorder = sorted(pattern.qcells, key=lambda q: (pattern.qdegree[q], poset.order_key((q, generic))))
    for q in qorder:
        x = (q, generic)
        faces = poset.covered_by(x)
        if not faces:
            continue
        sol = _solve_local(x, faces, pattern.qdegree[q],
                           lambda y: [(z, arc_lookup(y, z)) for z in poset.covered_by(y)], {})
        if sol is None:
            raise NoConsistentSigns(f"no shift-invariant signs on the faces of quotient cell {q}")
        for y, s in sol.items():
            arc_signs[(q, y[0], y[1] - generic)] = s

    explicit: dict = {}
    inc = IncidenceMap(explicit, arc_signs, start)

    def is_tail(e):
        return poset.is_tail(e)

    zone = poset.materialize(start + 1)
    for x in sorted(zone, key=lambda e: (poset.degree(e), poset.order_key(e))):
        faces = poset.covered_by(x)
        if not faces:
            continue
        deg = poset.degree(x)

        def known(y):
            return [(z, inc.sign(y, z)) for z in poset.covered_by(y)]

        sol = None
        if is_tail(x):
            fixed = {y: arc_signs[(x[0], y[0], y[1] - x[1])] for y in faces if is_tail(y)}
            sol = _solve_local(x, faces, deg, known, fixed)
            if sol is not None:
                sol = {y: s for y, s in sol.items() if y not in fixed}
        if sol is None:
            sol = _solve_local(x, faces, deg, known, {})
        if sol is None:
            raise NoConsistentSigns(f"no sign choice on the faces of {format_elem(x)} squares the boundary to zero")
        explicit.update({(x, y): s for y, s in sol.items()})

    # the generic rows must still square to zero next to the seam
    for x in poset.materialize(start + 4):
        if not check_local(poset, inc, x):
            raise NoConsistentSigns(f"signs near the prefix seam fail at {format_elem(x)}")
    return inc


def check_local(poset, inc, x) -> bool:
    """The codegree-2 sum condition at ``x`` (and the augmentation in degree 1)."""
    faces = poset.covered_by(x)
    if poset.degree(x) == 1:
        return sum(inc.sign(x, y) for y in faces) == 0
    acc: dict = {}
    for y in faces:
        e = inc.sign(x, y)
        for z in poset.covered_by(y):
            acc[z] = acc.get(z, 0) + e * inc.sign(y, z)
    return not any(acc.values())
