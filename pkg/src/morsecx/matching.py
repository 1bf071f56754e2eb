"""Morse matchings, the modified Hasse digraph H_M and descent statistics.

On a periodic poset a matching is a finite list of explicit pairs (each
touching at least one prefix element) plus a periodic *selection* on the
tail: an entry ``(u, v, shift, phase)`` matches ``(u, i)`` with
``(v, i + shift)`` for every tail row ``i`` congruent to ``phase`` modulo the
matching period, provided both ends lie in the tail.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .errors import BudgetExceeded, NotACover, NotAcyclic, Overlap, UnknownElement
from .poset import format_elem, row_of


class MorseMatching:
    def __init__(self, poset, pairs: Iterable[tuple] = (), selection: Iterable[tuple] = (), period: int = 1):
        self.poset = poset
        self.pairs = tuple(pairs)
        self.selection = tuple(sorted(set(selection), key=lambda e: (e[3], e[0], e[1], e[2])))
        self.period = period
        self._up = {y: x for x, y in self.pairs}  # lower -> upper
        self._down = {x: y for x, y in self.pairs}  # upper -> lower
        self._sel_down: dict = {}
        self._sel_up: dict = {}
        for u, v, s, ph in self.selection:
            self._sel_down.setdefault((u, ph), []).append((v, s))
            self._sel_up.setdefault((v, (ph + s) % period), []).append((u, s))

    def __repr__(self) -> str:
        return f"MorseMatching({len(self.pairs)} pairs, {len(self.selection)} selected arcs, period {self.period})"

    @property
    def is_periodic(self) -> bool:
        return self.poset.is_periodic

    def down_mate(self, x):
        """The lower partner of ``x`` if ``x`` is the upper end of a pair."""
        y = self._down.get(x)
        if y is not None or not self.is_periodic or not self.poset.is_tail(x):
            return y
        q, i = x
        for v, s in self._sel_down.get((q, i % self.period), ()):
            y = (v, i + s)
            if self.poset.is_tail(y):
                return y
        return None

    def up_mate(self, x):
        """The upper partner of ``x`` if ``x`` is the lower end of a pair."""
        z = self._up.get(x)
        if z is not None or not self.is_periodic or not self.poset.is_tail(x):
            return z
        q, i = x
        for u, s in self._sel_up.get((q, i % self.period), ()):
            z = (u, i - s)
            if self.poset.is_tail(z):
                return z
        return None

    def partner(self, x):
        z = self.up_mate(x)
        return z if z is not None else self.down_mate(x)

    def is_critical(self, x) -> bool:
        if x not in self.poset:
            raise UnknownElement(f"unknown element {format_elem(x)}")
        return self.partner(x) is None

    def explicit_pairs_in(self, elements) -> list[tuple]:
        """All matched pairs ``(upper, lower)`` with both ends in ``elements``."""
        es = set(elements)
        out = []
        for x in sorted(es, key=self.poset.order_key):
            y = self.down_mate(x)
            if y is not None and y in es:
                out.append((x, y))
        return out

    def same_matching(self, other: "MorseMatching", last_row: int | None = None) -> bool:
        elems = self.poset.window(last_row) if self.is_periodic else self.poset.elements
        return all(self.partner(x) == other.partner(x) for x in elems)


def _normalize_selection(selection, period):
    out = []
    for entry in selection:
        if len(entry) == 3:
            u, v, s = entry
            out.extend((u, v, int(s), ph) for ph in range(period))
        else:
            u, v, s, ph = entry
            out.append((u, v, int(s), int(ph)))
    return out


def build_matching(poset, pairs: Iterable[tuple] = (), selection: Iterable[tuple] = (), period: int = 1) -> MorseMatching:
    """Validate a matching. Selection entries without a phase apply to every phase."""
    if period < 1:
        raise ValueError("period must be positive")
    pairs = [tuple(p) for p in pairs]
    selection = _normalize_selection(selection, period)
    if selection and not poset.is_periodic:
        raise NotACover("arc selections need a periodic poset")
    seen: dict = {}
    for x, y in pairs:
        for z in (x, y):
            if z not in poset:
                raise UnknownElement(f"matched pair references unknown element {format_elem(z)}")
        if y not in poset.covered_by(x):
            raise NotACover(f"{format_elem(x)} does not cover {format_elem(y)}")
        if poset.is_periodic and poset.is_tail(x) and poset.is_tail(y):
            raise NotACover(f"pair {format_elem(x)} > {format_elem(y)} lies in the periodic tail; use an arc selection")
        for z in (x, y):
            if z in seen:
                raise Overlap(f"{format_elem(z)} is matched twice ({format_elem(seen[z][0])} > {format_elem(seen[z][1])} "
                              f"and {format_elem(x)} > {format_elem(y)})")
            seen[z] = (x, y)
    if poset.is_periodic:
        arcs = set(poset.pattern.arcs)
        touched: dict = {}
        for u, v, s, ph in selection:
            if (u, v, s) not in arcs:
                raise NotACover(f"no pattern arc {u} > {v} with shift {s}")
            if not 0 <= ph < period:
                raise ValueError(f"phase {ph} outside 0..{period - 1}")
            for node in ((u, ph), (v, (ph + s) % period)):
                if node in touched:
                    raise Overlap(f"quotient cell {node[0]} at phase {node[1]} is the end of two selected arcs")
                touched[node] = (u, v, s, ph)
    m = MorseMatching(poset, pairs, selection, period)
    if poset.is_periodic:
        # explicit pairs must not collide with selected arcs at the seam
        for z in seen:
            if poset.is_tail(z):
                q, i = z
                hits = [(v, i + s) for v, s in m._sel_down.get((q, i % period), ()) if poset.is_tail((v, i + s))]
                hits += [(u, i - s) for u, s in m._sel_up.get((q, i % period), ()) if poset.is_tail((u, i - s))]
                if hits:
                    raise Overlap(f"{format_elem(z)} is matched explicitly and by the arc selection")
    return m


def empty_matching(poset) -> MorseMatching:
    return MorseMatching(poset)


# the modified Hasse digraph


def modified_hasse_out(m: MorseMatching, x) -> tuple:
    """Out-neighbours of ``x`` in H_M: unmatched faces, plus the upper partner."""
    if x not in m.poset:
        raise UnknownElement(f"unknown element {format_elem(x)}")
    low = m.down_mate(x)
    out = [y for y in m.poset.covered_by(x) if y != low]
    z = m.up_mate(x)
    if z is not None:
        out.append(z)
    return tuple(out)


def m_plus(m: MorseMatching, x) -> tuple:
    """Faces of the upper partner of ``x`` other than ``x`` (empty unless ``x``
    is matched upward)."""
    if x not in m.poset:
        raise UnknownElement(f"unknown element {format_elem(x)}")
    z = m.up_mate(x)
    if z is None:
        return ()
    return tuple(y for y in m.poset.covered_by(z) if y != x)


# quotient of H_M for periodic posets


def quotient_graph(m: MorseMatching) -> nx.MultiDiGraph:
    """Shift-labelled quotient of H_M on the periodic tail.

    Nodes are ``(qcell, phase)``; each edge carries ``w`` (row change) and
    ``arc``/``matched`` for bookkeeping.
    """
    p = m.period
    pat = m.poset.pattern
    g = nx.MultiDiGraph()
    for q in pat.qcells:
        for ph in range(p):
            g.add_node((q, ph))
    selected = set(m.selection)
    for u, v, s in pat.arcs:
        for ph in range(p):
            a, b = (u, ph), (v, (ph + s) % p)
            if (u, v, s, ph) in selected:
                g.add_edge(b, a, w=-s, arc=(u, v, s, ph), matched=True)
            else:
                g.add_edge(a, b, w=s, arc=(u, v, s, ph), matched=False)
    return g


def quotient_components(m: MorseMatching) -> list[dict]:
    """Strongly connected pieces of the quotient that contain a cycle.

    Each entry has the node set, internal edges and the sign of its cycles
    (+1, -1, or 0 when cycles of both signs or of weight zero exist).
    """
    g = quotient_graph(m)
    nodes_order = {n: i for i, n in enumerate(g.nodes)}
    out = []
    for comp in nx.strongly_connected_components(g):
        sub = g.subgraph(comp)
        edges = list(sub.edges(keys=True, data=True))
        if not edges:
            continue
        n = len(comp)
        h = nx.MultiDiGraph()
        h.add_nodes_from(comp)
        for a, b, k, d in edges:
            h.add_edge(a, b, k, pos=(n + 1) * d["w"] - 1, neg=-(n + 1) * d["w"] - 1)
        has_nonpos = nx.negative_edge_cycle(h, weight="pos")
        has_nonneg = nx.negative_edge_cycle(h, weight="neg")
        sign = 0 if has_nonpos and has_nonneg else (1 if has_nonneg else -1)
        out.append({"nodes": sorted(comp, key=nodes_order.__getitem__), "edges": edges, "sign": sign})
    out.sort(key=lambda c: nodes_order[c["nodes"][0]])
    return out


# acyclicity


@dataclass(frozen=True)
class AcyclicityVerdict:
    acyclic: bool
    witness: tuple | None = None
    window_rows: int | None = None

    def __bool__(self) -> bool:
        return self.acyclic

    def as_dict(self) -> dict:
        return {"acyclic": self.acyclic,
                "witness": None if self.witness is None else [format_elem(x) for x in self.witness]}


def seam_rows(m: MorseMatching) -> int:
    """Rows past the prefix that certify acyclicity of a periodic matching.

    A cycle through the seam is a one-counter walk; with n quotient nodes its
    height stays below n*n + 2n + 2 rows.
    """
    n = len(m.poset.pattern.qcells) * m.period
    return n * n + 2 * n + 2


def _find_cycle(elements, out) -> tuple | None:
    inside = set(elements)
    color = dict.fromkeys(elements, 0)
    for root in elements:
        if color[root]:
            continue
        stack = [(root, iter(out(root)))]
        path = [root]
        color[root] = 1
        while stack:
            x, it = stack[-1]
            for y in it:
                if y not in inside:
                    continue
                if color[y] == 1:
                    return tuple(path[path.index(y):])
                if color[y] == 0:
                    color[y] = 1
                    path.append(y)
                    stack.append((y, iter(out(y))))
                    break
            else:
                color[x] = 2
                stack.pop()
                path.pop()
    return None


def is_acyclic(m: MorseMatching) -> AcyclicityVerdict:
    """Decide acyclicity of H_M; a witness cycle is returned on failure."""
    poset = m.poset
    if not poset.is_periodic:
        cyc = _find_cycle(poset.elements, lambda x: modified_hasse_out(m, x))
        return AcyclicityVerdict(cyc is None, cyc)
    rows = seam_rows(m)
    elements = poset.materialize(poset.start + rows)
    cyc = _find_cycle(elements, lambda x: modified_hasse_out(m, x))
    return AcyclicityVerdict(cyc is None, cyc, rows)


# critical cells


@dataclass(frozen=True)
class CriticalReport:
    """Critical elements by degree; ``markers`` lists ``(qcell, phase)``
    classes critical in every row ``>= from_row`` of that phase."""

    by_degree: dict
    markers: tuple = ()
    period: int = 1
    from_row: int | None = None

    @property
    def finite(self) -> bool:
        return not self.markers

    @property
    def elements(self) -> tuple:
        return tuple(x for d in sorted(self.by_degree) for x in self.by_degree[d])

    def counts(self, top: int | None = None) -> tuple[int, ...]:
        top = max(self.by_degree, default=-1) if top is None else top
        return tuple(len(self.by_degree.get(d, ())) for d in range(top + 1))

    def __len__(self) -> int:
        return sum(len(v) for v in self.by_degree.values())

    def as_dict(self) -> dict:
        return {
            "by_degree": {str(d): [format_elem(x) for x in xs] for d, xs in sorted(self.by_degree.items())},
            "markers": [{"cell": q, "phase": ph, "period": self.period, "from_row": self.from_row}
                        for q, ph in self.markers],
        }


def critical_cells(m: MorseMatching) -> CriticalReport:
    poset = m.poset
    if poset.is_periodic:
        explicit = poset.materialize(poset.start)
    else:
        explicit = poset.elements
    by: dict = {}
    for x in explicit:
        if m.partner(x) is None:
            by.setdefault(poset.degree(x), []).append(x)
    by = {d: tuple(v) for d, v in sorted(by.items())}
    if not poset.is_periodic:
        return CriticalReport(by)
    p = m.period
    r0 = poset.start + 1
    markers = []
    for ph in range(p):
        row = r0 + ((ph - r0) % p)
        for q in poset.pattern.qcells:
            if m.partner((q, row)) is None:
                markers.append((q, ph))
    markers.sort(key=lambda t: (t[1], poset.order_key((t[0], r0))))
    return CriticalReport(by, tuple(markers), p, r0)


# descent


def default_budget(m: MorseMatching, x=None) -> int:
    poset = m.poset
    if not poset.is_periodic:
        return 10 * len(poset) + 10
    n = len(poset.pattern.qcells) * m.period
    r = row_of(x) if x is not None and row_of(x) is not None else poset.start
    rows = max(r - poset.start, 0) + n + 3
    return 10 * rows * len(poset.pattern.qcells) + 10 * len(poset.prefix) + 10


@dataclass(frozen=True)
class DescentDigraph:
    root: object
    vertices: tuple
    arrows: dict = field(repr=False)

    def __len__(self) -> int:
        return len(self.vertices)


def descent_digraph(m: MorseMatching, x, step_budget: int | None = None) -> DescentDigraph:
    """Closure of ``x`` under M_+ (breadth first)."""
    if x not in m.poset:
        raise UnknownElement(f"unknown element {format_elem(x)}")
    budget = default_budget(m, x) if step_budget is None else step_budget
    seen = {x: None}
    arrows = {}
    queue = deque([x])
    while queue:
        y = queue.popleft()
        nxt = m_plus(m, y)
        arrows[y] = nxt
        for z in nxt:
            if z not in seen:
                seen[z] = None
                if len(seen) > budget:
                    raise BudgetExceeded(f"descent from {format_elem(x)} exceeded {budget} vertices; "
                                         "the matching is probably not rayless")
                queue.append(z)
    return DescentDigraph(x, tuple(seen), arrows)


def l_M(m: MorseMatching, x, step_budget: int | None = None, _memo: dict | None = None) -> int:
    """Length of the longest directed path in D_M(x)."""
    dg = descent_digraph(m, x, step_budget)
    memo = {} if _memo is None else _memo
    state: dict = {}
    order = []
    stack = [(x, iter(dg.arrows[x]))]
    state[x] = 1
    while stack:
        y, it = stack[-1]
        for z in it:
            if z in memo:
                continue
            if state.get(z) == 1:
                raise NotAcyclic(f"descent digraph of {format_elem(x)} has a cycle through {format_elem(z)}")
            if z not in state:
                state[z] = 1
                stack.append((z, iter(dg.arrows[z])))
                break
        else:
            stack.pop()
            state[y] = 2
            order.append(y)
    for y in order:
        if y not in memo:
            memo[y] = 1 + max((memo[z] for z in dg.arrows[y]), default=-1) if dg.arrows[y] else 0
    return memo[x]


# raylessness


@dataclass(frozen=True)
class RaylessVerdict:
    rayless: bool
    cycle: tuple = ()  # quotient cycle as ((qcell, phase), shift) steps
    unrolled: tuple = ()

    def __bool__(self) -> bool:
        return self.rayless

    def as_dict(self) -> dict:
        return {
            "rayless": self.rayless,
            "witness": None if self.rayless else {
                "cycle": [[f"{q}@{ph}", w] for (q, ph), w in self.cycle],
                "unrolled": [format_elem(x) for x in self.unrolled],
            },
        }


def positive_cycle(m: MorseMatching):
    """Some quotient cycle with positive net shift, as ``[(node, weight)]``."""
    for comp in quotient_components(m):
        if comp["sign"] > 0:
            sub = nx.MultiDiGraph()
            for a, b, k, d in comp["edges"]:
                sub.add_edge(a, b, k, **d)
            cyc = nx.find_cycle(sub, source=comp["nodes"][0])
            return [(a, sub.edges[a, b, k]["w"]) for a, b, k in cyc]
    return None


def is_rayless(m: MorseMatching) -> RaylessVerdict:
    if not m.poset.is_periodic:
        return RaylessVerdict(True)
    cyc = positive_cycle(m)
    if cyc is None:
        return RaylessVerdict(True)
    # unroll three periods from a row deep in the periodic region
    (q0, ph0), _ = cyc[0]
    p = m.period
    row = m.poset.start + 1 + len(cyc)
    row += (ph0 - row) % p
    path = [(q0, row)]
    r = row
    for _ in range(3):
        for i, ((q, _ph), w) in enumerate(cyc):
            r += w
            nq = cyc[(i + 1) % len(cyc)][0][0]
            path.append((nq, r))
    return RaylessVerdict(False, tuple(cyc), tuple(path))


# matchings for finite complexes


def greedy_collapse_matching(poset) -> MorseMatching:
    """Collapse free faces; when stuck, declare a top-degree cell critical."""
    alive = set(poset.elements)
    cof = {x: set(poset.covering(x)) for x in poset.elements}
    pairs = []
    key = poset.order_key
    while alive:
        free = None
        for x in sorted(alive, key=lambda e: (-poset.degree(e), key(e))):
            ups = [z for z in cof[x] if z in alive]
            if len(ups) == 1:
                z = ups[0]
                if not any(w in alive for w in cof[z]):
                    free = (z, x)
                    break
        if free is not None:
            pairs.append(free)
            alive.discard(free[0])
            alive.discard(free[1])
            continue
        top = max(poset.degree(e) for e in alive)
        crit = min((e for e in alive if poset.degree(e) == top), key=key)
        alive.discard(crit)
    return build_matching(poset, sorted(pairs, key=lambda p: key(p[0])))


def random_acyclic_matching(poset, rng: random.Random | None = None, tries: int | None = None) -> MorseMatching:
    """Grow an acyclic matching by adding random cover pairs that keep H_M acyclic."""
    rng = rng or random.Random(0)
    covers = [(x, y) for x in poset.elements for y in poset.covered_by(x)]
    rng.shuffle(covers)
    if tries is not None:
        covers = covers[:tries]
    used: set = set()
    pairs: list = []
    for x, y in covers:
        if x in used or y in used:
            continue
        trial = MorseMatching(poset, pairs + [(x, y)])
        # a new cycle must pass through the reversed arrow y -> x
        if _reaches(trial, x, y):
            continue
        pairs.append((x, y))
        used.update((x, y))
    return build_matching(poset, pairs)


def _reaches(m: MorseMatching, src, dst) -> bool:
    seen = {src}
    stack = [src]
    while stack:
        a = stack.pop()
        for b in modified_hasse_out(m, a):
            if b == dst:
                return True
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return False
