"""Graded posets with finite principal ideals.

Two presentations share one duck-typed interface (``degree``, ``covered_by``,
``covering``, ``order_key``, ``window`` ...):

* :class:`FinitePoset` -- explicit elements and covers.
* :class:`PeriodicPoset` -- a one-ended infinite poset given by a finite
  :class:`QuotientPattern` whose arcs carry a row shift in {-1, 0, +1}, plus a
  finite prefix glued onto the first tail row.

Elements of the periodic tail are ``(qcell, row)`` tuples; prefix elements are
strings, or ``(qcell, row)`` tuples for rows that were unrolled into the
prefix. An element keeps its identity under :meth:`PeriodicPoset.unroll`.
"""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import CycleInCovers, DanglingGlue, NotGraded, UnknownElement
from .homology import simplicial_homology
from .simplicial import SimplicialComplex, simplex_id

Elem = Hashable


def is_tail_ref(x) -> bool:
    return type(x) is tuple and len(x) == 2 and isinstance(x[0], str) and type(x[1]) is int


def format_elem(x) -> str:
    if is_tail_ref(x):
        return f"{x[0]}@{x[1]}"
    return str(x)


def parse_elem(token: str) -> Elem:
    if "@" in token:
        q, _, row = token.rpartition("@")
        return (q, int(row))
    return token


def row_of(x) -> int | None:
    return x[1] if is_tail_ref(x) else None


# finite posets


class FinitePoset:
    is_periodic = False

    def __init__(self, elements: Sequence, degree: Mapping, down: Mapping, up: Mapping):
        self.elements = tuple(elements)
        self._index = {x: i for i, x in enumerate(self.elements)}
        self._degree = dict(degree)
        self._down = {x: tuple(down.get(x, ())) for x in self.elements}
        self._up = {x: tuple(up.get(x, ())) for x in self.elements}

    def __contains__(self, x) -> bool:
        return x in self._index

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"FinitePoset({len(self.elements)} elements, {sum(map(len, self._down.values()))} covers)"

    def _check(self, x):
        if x not in self._index:
            raise UnknownElement(f"unknown element {format_elem(x)}")

    def degree(self, x) -> int:
        self._check(x)
        return self._degree[x]

    def covered_by(self, x) -> tuple:
        """Elements ``y`` with ``x`` covering ``y``, in canonical order."""
        self._check(x)
        return self._down[x]

    def covering(self, x) -> tuple:
        self._check(x)
        return self._up[x]

    def order_key(self, x):
        return self._index[x]

    def covers(self) -> list[tuple]:
        return [(x, y) for x in self.elements for y in self._down[x]]

    def window(self, rows: int | None = None) -> tuple:
        return self.elements

    @property
    def max_degree(self) -> int:
        return max(self._degree.values(), default=-1)

    def by_degree(self) -> dict[int, tuple]:
        out: dict[int, list] = {}
        for x in self.elements:
            out.setdefault(self._degree[x], []).append(x)
        return {k: tuple(v) for k, v in sorted(out.items())}


def build_finite_poset(elements: Iterable, covers: Iterable[tuple], degrees: Mapping | None = None) -> FinitePoset:
    """Validate and build a finite graded poset from its cover relation.

    Degrees are computed from chain lengths; if ``degrees`` is given it is
    checked against them.
    """
    elements = list(elements)
    if len(set(elements)) != len(elements):
        raise ValueError("duplicate element ids")
    known = set(elements)
    index = {x: i for i, x in enumerate(elements)}
    down: dict = {x: [] for x in elements}
    up: dict = {x: [] for x in elements}
    seen = set()
    for x, y in covers:
        for z in (x, y):
            if z not in known:
                raise UnknownElement(f"cover references unknown element {format_elem(z)}")
        if x == y:
            raise CycleInCovers(f"{format_elem(x)} covers itself")
        if (x, y) in seen:
            continue
        seen.add((x, y))
        down[x].append(y)
        up[y].append(x)
    try:
        order = list(TopologicalSorter({x: down[x] for x in elements}).static_order())
    except CycleError as exc:
        cyc = " > ".join(format_elem(z) for z in reversed(exc.args[1]))
        raise CycleInCovers(f"cover relation has a cycle: {cyc}") from None
    lo, hi = {}, {}
    for x in order:  # faces come first
        if down[x]:
            lo[x] = 1 + min(lo[y] for y in down[x])
            hi[x] = 1 + max(hi[y] for y in down[x])
        else:
            lo[x] = hi[x] = 0
    for x in elements:
        if lo[x] != hi[x]:
            raise NotGraded(f"maximal chains below {format_elem(x)} have lengths {lo[x]} and {hi[x]}")
    if degrees is not None:
        for x, d in degrees.items():
            if x in hi and hi[x] != d:
                raise NotGraded(f"{format_elem(x)} declared degree {d} but has degree {hi[x]}")
    for x in elements:
        down[x].sort(key=index.__getitem__)
        up[x].sort(key=index.__getitem__)
    return FinitePoset(elements, hi, down, up)


# periodic posets


@dataclass(frozen=True)
class QuotientPattern:
    """Finite quotient of the periodic tail.

    An arc ``(u, v, s)`` declares ``(u, i)`` covers ``(v, i + s)`` for every
    tail row ``i`` where both ends exist.
    """

    qcells: tuple[str, ...]
    qdegree: Mapping[str, int]
    arcs: tuple[tuple[str, str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "qcells", tuple(self.qcells))
        object.__setattr__(self, "qdegree", dict(self.qdegree))
        object.__setattr__(self, "arcs", tuple((u, v, int(s)) for u, v, s in self.arcs))
        if len(set(self.qcells)) != len(self.qcells):
            raise ValueError("duplicate quotient cells")
        cells = set(self.qcells)
        if set(self.qdegree) != cells:
            raise ValueError("qdegree must cover exactly the quotient cells")
        if len(set(self.arcs)) != len(self.arcs):
            raise ValueError("duplicate arcs")
        for u, v, s in self.arcs:
            for q in (u, v):
                if q not in cells:
                    raise UnknownElement(f"arc references unknown quotient cell {q}")
            if s not in (-1, 0, 1):
                raise NotGraded(f"arc {u}>{v} has shift {s}; shifts must lie in -1..1")
            if self.qdegree[u] != self.qdegree[v] + 1:
                raise NotGraded(f"arc {u}>{v} joins degrees {self.qdegree[u]} and {self.qdegree[v]}")
        for q in self.qcells:
            if self.qdegree[q] < 0:
                raise NotGraded(f"negative degree for {q}")
            if self.qdegree[q] > 0 and not any(u == q for u, _, _ in self.arcs):
                raise NotGraded(f"quotient cell {q} of degree {self.qdegree[q]} covers nothing")


def build_pattern(cells: Iterable[tuple[str, int]], arcs: Iterable[tuple[str, str, int]]) -> QuotientPattern:
    cells = list(cells)
    return QuotientPattern(tuple(q for q, _ in cells), {q: d for q, d in cells}, tuple(arcs))


class PeriodicPoset:
    """One-ended periodic poset: finite prefix + lift of a quotient pattern.

    Tail elements are ``(q, i)`` for ``i >= start``. ``glue`` holds the covers
    between prefix elements and tail row ``start``.
    """

    is_periodic = True

    def __init__(self, pattern: QuotientPattern, prefix: Sequence, prefix_degree: Mapping,
                 prefix_covers: Sequence[tuple], glue: Sequence[tuple], start: int):
        self.pattern = pattern
        self.prefix = tuple(prefix)
        self.prefix_covers = tuple(prefix_covers)
        self.glue = tuple(glue)
        self.start = start
        self._pindex = {x: i for i, x in enumerate(self.prefix)}
        self._pdeg = dict(prefix_degree)
        self._qindex = {q: i for i, q in enumerate(pattern.qcells)}
        self._down_arcs: dict[str, list] = {q: [] for q in pattern.qcells}
        self._up_arcs: dict[str, list] = {q: [] for q in pattern.qcells}
        for u, v, s in pattern.arcs:
            self._down_arcs[u].append((v, s))
            self._up_arcs[v].append((u, s))
        pd: dict = {x: [] for x in self.prefix}
        pu: dict = {x: [] for x in self.prefix}
        self._gdown: dict = {}
        self._gup: dict = {}
        for x, y in self.prefix_covers:
            pd[x].append(y)
            pu[y].append(x)
        for x, y in self.glue:
            if x in self._pindex:
                pd[x].append(y)
                self._gup.setdefault(y, []).append(x)
            else:
                self._gdown.setdefault(x, []).append(y)
                pu[y].append(x)
        key = self.order_key
        self._pdown = {x: tuple(sorted(v, key=key)) for x, v in pd.items()}
        self._pup = {x: tuple(sorted(v, key=key)) for x, v in pu.items()}

    @property
    def prefix_depth(self) -> int:
        return self.start - 1

    def __repr__(self) -> str:
        return (f"PeriodicPoset({len(self.pattern.qcells)} quotient cells, {len(self.pattern.arcs)} arcs, "
                f"{len(self.prefix)} prefix elements, tail from row {self.start})")

    def is_tail(self, x) -> bool:
        return is_tail_ref(x) and x not in self._pindex and x[0] in self._qindex and x[1] >= self.start

    def __contains__(self, x) -> bool:
        return x in self._pindex or self.is_tail(x)

    def _check(self, x):
        if x not in self:
            raise UnknownElement(f"unknown element {format_elem(x)}")

    def degree(self, x) -> int:
        if x in self._pindex:
            return self._pdeg[x]
        self._check(x)
        return self.pattern.qdegree[x[0]]

    def covered_by(self, x) -> tuple:
        if x in self._pindex:
            return self._pdown[x]
        self._check(x)
        q, i = x
        out = [(v, i + s) for v, s in self._down_arcs[q] if i + s >= self.start]
        out.extend(self._gdown.get(x, ()))
        return tuple(sorted(out, key=self.order_key))

    def covering(self, x) -> tuple:
        if x in self._pindex:
            return self._pup[x]
        self._check(x)
        q, i = x
        out = [(u, i - s) for u, s in self._up_arcs[q] if i - s >= self.start]
        out.extend(self._gup.get(x, ()))
        return tuple(sorted(out, key=self.order_key))

    def order_key(self, x):
        if x in self._pindex:
            return (0, self._pindex[x], 0)
        return (1, x[1], self._qindex[x[0]])

    def row_elements(self, row: int) -> tuple:
        if row < self.start:
            return ()
        return tuple((q, row) for q in self.pattern.qcells)

    def materialize(self, last_row: int) -> tuple:
        """Prefix plus every tail element in rows ``start..last_row``."""
        out = list(self.prefix)
        for i in range(self.start, last_row + 1):
            out.extend(self.row_elements(i))
        return tuple(out)

    def window(self, rows: int | None = None) -> tuple:
        """Down-closed finite piece: elements in rows <= ``rows`` whose faces
        all lie in rows <= ``rows``."""
        if rows is None:
            rows = self.start + 2
        keep = set()
        # faces have lower degree, so one pass in degree order suffices
        for x in sorted(self.materialize(rows), key=self.degree):
            if all(y in keep for y in self.covered_by(x)):
                keep.add(x)
        return tuple(sorted(keep, key=self.order_key))

    @property
    def max_degree(self) -> int:
        return max([*self.pattern.qdegree.values(), *self._pdeg.values()], default=-1)

    @property
    def quotient_size(self) -> int:
        return len(self.pattern.qcells)

    def unroll(self, rows: int = 1) -> "PeriodicPoset":
        """Same poset with tail rows ``start..start+rows-1`` moved into the prefix."""
        if rows <= 0:
            return self
        new_start = self.start + rows
        moved = [x for i in range(self.start, new_start) for x in self.row_elements(i)]
        prefix = list(self.prefix) + moved
        pdeg = dict(self._pdeg)
        for x in moved:
            pdeg[x] = self.pattern.qdegree[x[0]]
        pset = set(prefix)
        covers = list(self.prefix_covers) + list(self.glue)
        glue = []
        for x in moved:
            for y in self.covered_by(x):
                if (x, y) in self._glue_set:
                    continue
                (covers if y in pset else glue).append((x, y))
            for z in self.covering(x):
                if z not in pset:
                    glue.append((z, x))
        return PeriodicPoset(self.pattern, prefix, pdeg, covers, glue, new_start)

    @property
    def _glue_set(self) -> frozenset:
        gs = self.__dict__.get("_glue_cache")
        if gs is None:
            gs = frozenset(self.glue)
            self.__dict__["_glue_cache"] = gs
        return gs

    def covers_in(self, elements: Iterable) -> list[tuple]:
        es = set(elements)
        return [(x, y) for x in sorted(es, key=self.order_key) for y in self.covered_by(x) if y in es]

    def same_poset(self, other: "PeriodicPoset", rows: int = 3) -> bool:
        """Compare two presentations on a common window (used in tests)."""
        last = max(self.start, other.start) + rows
        a, b = set(self.materialize(last)), set(other.materialize(last))
        if a != b:
            return False
        return all(set(self.covered_by(x)) == set(other.covered_by(x)) for x in a)


def build_periodic_poset(pattern: QuotientPattern, prefix: FinitePoset | Sequence | None = None,
                         glue: Iterable[tuple] = (), start: int | None = None,
                         prefix_covers: Iterable[tuple] | None = None,
                         degrees: Mapping | None = None) -> PeriodicPoset:
    """Validate and build a periodic poset.

    ``prefix`` is a :class:`FinitePoset` or a list of element ids (then
    ``prefix_covers`` lists the covers among them). ``start`` is the first
    tail row (prefix depth + 1); by default 0 for an empty prefix and 1
    otherwise. Degrees of prefix elements are computed, never trusted.
    """
    if isinstance(prefix, FinitePoset):
        elements = list(prefix.elements)
        pcovers = prefix.covers()
    else:
        elements = list(prefix or ())
        pcovers = list(prefix_covers or ())
    if len(set(elements)) != len(elements):
        raise ValueError("duplicate prefix ids")
    if start is None:
        start = 1 if elements else 0
    pset = set(elements)
    qset = set(pattern.qcells)

    def tail(z):
        return is_tail_ref(z) and z not in pset and z[0] in qset and z[1] >= start

    for x, y in pcovers:
        for z in (x, y):
            if z not in pset:
                raise UnknownElement(f"prefix cover references unknown element {format_elem(z)}")
    glue = list(glue)
    for x, y in glue:
        if x in pset and tail(y) or y in pset and tail(x):
            t = y if x in pset else x
            if t[1] != start:
                raise DanglingGlue(f"glue {format_elem(x)}>{format_elem(y)} must meet tail row {start}")
            continue
        bad = [format_elem(z) for z in (x, y) if z not in pset and not tail(z)]
        if bad:
            raise DanglingGlue(f"glue {format_elem(x)}>{format_elem(y)} references unknown cell {bad[0]}")
        raise DanglingGlue(f"glue {format_elem(x)}>{format_elem(y)} must join the prefix to tail row {start}")

    # degrees of prefix elements from the combined cover relation
    down: dict = {x: [] for x in elements}
    for x, y in [*pcovers, *glue]:
        if x in pset:
            down[x].append(y)
    try:
        order = list(TopologicalSorter({x: [y for y in down[x] if y in pset] for x in elements}).static_order())
    except CycleError as exc:
        cyc = " > ".join(format_elem(z) for z in reversed(exc.args[1]))
        raise CycleInCovers(f"prefix cover relation has a cycle: {cyc}") from None
    deg: dict = {}
    for x in order:
        ds = {deg[y] if y in pset else pattern.qdegree[y[0]] for y in down[x]}
        if len(ds) > 1:
            raise NotGraded(f"{format_elem(x)} covers elements of degrees {sorted(ds)}")
        deg[x] = ds.pop() + 1 if ds else 0
    if degrees:
        for x, d in degrees.items():
            if x in deg and deg[x] != d:
                raise NotGraded(f"{format_elem(x)} declared degree {d} but has degree {deg[x]}")
    poset = PeriodicPoset(pattern, elements, deg, pcovers, glue, start)
    # gradedness on the seam: three unrolled rows past the prefix
    for x in poset.materialize(start + 2):
        d = poset.degree(x)
        faces = poset.covered_by(x)
        if d > 0 and not faces:
            raise NotGraded(f"{format_elem(x)} has degree {d} but covers nothing")
        for y in faces:
            if poset.degree(y) != d - 1:
                raise NotGraded(f"cover {format_elem(x)}>{format_elem(y)} joins degrees {d} and {poset.degree(y)}")
    return poset


# generic operations


def down_set(poset, x) -> FinitePoset:
    """The finite principal ideal below ``x`` as a finite poset."""
    if x not in poset:
        raise UnknownElement(f"unknown element {format_elem(x)}")
    seen = {x}
    stack = [x]
    while stack:
        z = stack.pop()
        for y in poset.covered_by(z):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return induced_subposet(poset, seen)


def induced_subposet(poset, elements: Iterable) -> FinitePoset:
    """Induced poset on a finite set closed under taking faces within it."""
    es = sorted(set(elements), key=poset.order_key)
    eset = set(es)
    down = {x: [y for y in poset.covered_by(x) if y in eset] for x in es}
    up: dict = {x: [] for x in es}
    for x in es:
        for y in down[x]:
            up[y].append(x)
    degree = {x: poset.degree(x) for x in es}
    return FinitePoset(es, degree, down, up)


def _strictly_below(p: FinitePoset) -> dict:
    below: dict = {}
    for x in sorted(p.elements, key=p.degree):
        s = set()
        for y in p.covered_by(x):
            s.add(y)
            s |= below[y]
        below[x] = s
    return below


def chains(p: FinitePoset) -> list[tuple]:
    """All nonempty chains, each listed top-down."""
    below = _strictly_below(p)
    memo: dict = {}

    def from_top(x):
        if x not in memo:
            out = [(x,)]
            for y in below[x]:
                out.extend((x,) + c for c in from_top(y))
            memo[x] = out
        return memo[x]

    out = []
    for x in p.elements:
        out.extend(from_top(x))
    return out


def order_complex(p: FinitePoset) -> SimplicialComplex:
    """Simplicial complex whose simplices are the finite chains of ``p``."""
    index = {x: i for i, x in enumerate(p.elements)}
    simplices = frozenset(tuple(sorted(index[z] for z in c)) for c in chains(p))
    return SimplicialComplex(p.elements, simplices)


def face_poset(sc: SimplicialComplex) -> FinitePoset:
    """Simplices ordered by inclusion; ids come from :func:`simplex_id`."""
    simplices = sorted(sc.simplices, key=lambda s: (len(s), s))
    ids = {s: simplex_id(sc.labels(s)) for s in simplices}
    covers = []
    for s in simplices:
        if len(s) > 1:
            for i in range(len(s)):
                covers.append((ids[s], ids[s[:i] + s[i + 1:]]))
    return build_finite_poset([ids[s] for s in simplices], covers)


# cellularity and homological admissibility


@dataclass(frozen=True)
class AdmissibilityReport:
    checked: int
    failures: tuple[tuple[str, str], ...]
    assumption: str | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"checked": self.checked, "ok": self.ok,
                "failures": [list(f) for f in self.failures], "assumption": self.assumption}


_WINDOW_NOTE = ("periodic poset checked on the prefix and tail rows start..start+{k}; "
                "shift invariance is assumed to extend the certificate to all rows")


def _elements_to_check(poset, window):
    if not poset.is_periodic:
        return poset.elements, None
    k = poset.max_degree + 1
    last = poset.start + k
    if window is not None:
        last = max(last, window)
    return poset.materialize(last), _WINDOW_NOTE.format(k=last - poset.start)


def _strict_down(poset, x) -> FinitePoset:
    d = down_set(poset, x)
    return induced_subposet(d, [z for z in d.elements if z != x])


def _is_sphere(h, dim: int, empty: bool) -> bool:
    if dim < 0:
        return empty
    if empty:
        return False
    b = list(h.betti)
    if any(h.torsion):
        return False
    if dim == 0:
        return b == [2]
    return b == [1] + [0] * (dim - 1) + [1]


def is_cellular(poset, window: int | None = None) -> AdmissibilityReport:
    """Check that every strict down-set has the homology of a sphere of
    dimension ``degree - 1``."""
    elements, note = _elements_to_check(poset, window)
    failures = []
    for x in elements:
        sub = _strict_down(poset, x)
        h = simplicial_homology(order_complex(sub)) if len(sub) else None
        if not _is_sphere(h, poset.degree(x) - 1, len(sub) == 0):
            got = "empty" if h is None else f"betti {list(h.betti)} torsion {[list(t) for t in h.torsion]}"
            failures.append((format_elem(x), f"strict down-set is not a homology {poset.degree(x) - 1}-sphere ({got})"))
    return AdmissibilityReport(len(elements), tuple(failures), note)


def is_h_admissible(poset, window: int | None = None) -> AdmissibilityReport:
    """Homological admissibility, plus the cellularity it implies."""
    elements, note = _elements_to_check(poset, window)
    failures = []
    for x in elements:
        sub = _strict_down(poset, x)
        for y in poset.covered_by(x):
            rest = induced_subposet(sub, [z for z in sub.elements if z != y])
            if not len(rest):
                failures.append((format_elem(x), f"removing {format_elem(y)} leaves an empty complex"))
                continue
            h = simplicial_homology(order_complex(rest))
            if h.betti[:1] != (1,) or any(h.betti[1:]) or any(h.torsion):
                failures.append((format_elem(x), f"removing {format_elem(y)} leaves betti {list(h.betti)}"))
    cell = is_cellular(poset, window)
    failures.extend(f for f in cell.failures if f not in failures)
    return AdmissibilityReport(len(elements), tuple(failures), note)
