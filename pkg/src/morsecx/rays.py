"""Decreasing rays of H_M on periodic posets.

A ray is stored in lasso form: an explicit ``stem`` followed by the lift of a
quotient cycle. Position ``len(stem) + j + t * len(loop)`` holds
``(loop[j][0], base + loop[j][1] + t * shift)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm

import networkx as nx

from .errors import (AcyclicityLost, HasBypass, InfinitelyManyClasses, InvalidRay, MultirayPresent,
                     NotAcyclic, NotNormalized)
from .matching import (MorseMatching, build_matching, is_acyclic, is_rayless, modified_hasse_out,
                       quotient_components)
from .poset import format_elem, is_tail_ref, row_of


@dataclass(frozen=True)
class Ray:
    loop: tuple  # ((qcell, row offset), ...)
    shift: int
    base: int
    stem: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "loop", tuple((q, int(d)) for q, d in self.loop))
        object.__setattr__(self, "stem", tuple(self.stem))

    def element(self, k: int):
        n = len(self.stem)
        if k < n:
            return self.stem[k]
        t, j = divmod(k - n, len(self.loop))
        q, d = self.loop[j]
        return (q, self.base + d + t * self.shift)

    def elements(self, count: int) -> list:
        return [self.element(k) for k in range(count)]

    @property
    def period_length(self) -> int:
        return len(self.loop)

    def advanced(self, periods: int = 1) -> "Ray":
        """Equivalent ray starting ``periods`` loop turns later (stem dropped)."""
        return Ray(self.loop, self.shift, self.base + periods * self.shift)

    def index_of(self, x, limit: int) -> int | None:
        for k in range(limit):
            if self.element(k) == x:
                return k
        return None

    def cycle_entries(self) -> tuple:
        """Loop offsets followed by the closing entry, which carries the shift."""
        q0, d0 = self.loop[0]
        return self.loop + ((q0, d0 + self.shift),)

    def key(self):
        return (tuple(self.loop), self.shift, self.base % self.shift)

    def encoding(self) -> str:
        parts = []
        if self.stem:
            parts.append("prefix " + " ".join(format_elem(x) for x in self.stem))
        parts.append("cycle " + " ".join(f"{q}@{d}" for q, d in self.cycle_entries()))
        parts.append(f"phase {self.base}")
        return "ray " + "; ".join(parts)

    def as_dict(self, periods: int = 3) -> dict:
        return {
            "prefix": [format_elem(x) for x in self.stem],
            "cycle": [f"{q}@{d}" for q, d in self.cycle_entries()],
            "shift": self.shift,
            "phase": self.base,
            "unrolled": [format_elem(x) for x in self.elements(len(self.stem) + periods * len(self.loop) + 1)],
        }


@dataclass(frozen=True)
class Bypass:
    start_index: int
    end_index: int
    path: tuple

    def translated(self, rows: int, ray_period: int) -> "Bypass":
        path = tuple((q, i + rows) if is_tail_ref((q, i)) else (q, i) for q, i in self.path)
        return Bypass(self.start_index + ray_period, self.end_index + ray_period, path)

    def as_dict(self) -> dict:
        return {"start_index": self.start_index, "end_index": self.end_index,
                "path": [format_elem(x) for x in self.path]}


@dataclass(frozen=True)
class MultirayDetected:
    ray: Ray
    bypass: Bypass
    recurrence: Bypass

    @property
    def message(self) -> str:
        return ("multiray found: uncountably many ray classes (2^aleph_0); bypass from "
                f"{format_elem(self.bypass.path[0])} to {format_elem(self.bypass.path[-1])} "
                f"recurs every {self.ray.shift} rows")

    def as_dict(self) -> dict:
        return {"ray": self.ray.as_dict(), "bypass": self.bypass.as_dict(),
                "recurrence": self.recurrence.as_dict(), "message": self.message}


@dataclass(frozen=True)
class RayClassSet:
    classes: tuple = ()
    degrees: tuple = ()
    multiray: MultirayDetected | None = None
    uncertified: tuple = field(default=(), repr=False)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def finite(self) -> bool:
        return self.multiray is None and not self.uncertified

    def counts(self, top: int | None = None) -> tuple[int, ...]:
        top = max(self.degrees, default=-1) if top is None else top
        return tuple(sum(1 for d in self.degrees if d == n) for n in range(top + 1))

    def as_dict(self) -> dict:
        return {
            "count": len(self.classes),
            "classes": [dict(r.as_dict(), degree=d) for r, d in zip(self.classes, self.degrees)],
            "multiray": None if self.multiray is None else self.multiray.as_dict(),
        }


# validation


def _generic_periods(m: MorseMatching, r: Ray) -> int:
    """Loop turns after which every ray element sits in the periodic region."""
    lo = r.base + min(d for _, d in r.loop)
    need = m.poset.start + 2 - lo
    return max(0, -(-need // r.shift)) + 1


def validate_ray(m: MorseMatching, r: Ray) -> int:
    """Check ``r`` against H_M; returns how many positions were checked."""
    poset = m.poset
    if not poset.is_periodic:
        raise InvalidRay("finite posets have no rays")
    if not r.loop or r.shift < 1:
        raise InvalidRay("a ray needs a nonempty cycle with positive shift")
    if r.shift % m.period:
        raise InvalidRay(f"cycle shift {r.shift} is not a multiple of the matching period {m.period}")
    count = len(r.stem) + (_generic_periods(m, r) + 1) * len(r.loop) + 1
    elems = r.elements(count)
    if len(set(elems)) != len(elems):
        raise InvalidRay("ray repeats an element")
    for x in elems:
        if x not in poset:
            raise InvalidRay(f"ray element {format_elem(x)} is not in the poset")
    for a, b in zip(elems, elems[1:]):
        if b not in modified_hasse_out(m, a):
            raise InvalidRay(f"{format_elem(a)} -> {format_elem(b)} is not an arrow of H_M")
    return count


def ray_degree(m: MorseMatching, r: Ray, normalize: bool = False):
    """``(i0, j0)``: the least degree on ``r`` and the first index attaining it.

    With ``normalize`` the ray starting at ``r[j0]`` is returned as a third
    value.
    """
    validate_ray(m, r)
    deg = m.poset.degree
    span = len(r.stem) + len(r.loop)
    ds = [deg(r.element(k)) for k in range(span)]
    i0 = min(ds)
    j0 = ds.index(i0)
    if not normalize:
        return i0, j0
    return i0, j0, _drop(r, j0)


def _drop(r: Ray, k: int) -> Ray:
    """The ray ``r_k, r_{k+1}, ...``."""
    if k < len(r.stem):
        return Ray(r.loop, r.shift, r.base, r.stem[k:])
    t, j = divmod(k - len(r.stem), len(r.loop))
    q0, d0 = r.loop[j]
    loop = tuple((q, d - d0) for q, d in r.loop[j:]) + tuple((q, d + r.shift - d0) for q, d in r.loop[:j])
    return Ray(loop, r.shift, r.base + d0 + t * r.shift)


def is_normalized(m: MorseMatching, r: Ray) -> bool:
    i0, j0 = ray_degree(m, r)
    return j0 == 0 and m.up_mate(r.element(0)) == r.element(1)


# equivalence


def same_tail(r: Ray, s: Ray) -> bool:
    """Whether two lasso rays eventually coincide."""
    def stem_rows(x: Ray):
        rows = [row_of(e) for e in x.stem if row_of(e) is not None]
        return max(rows, default=0)

    hi = max(stem_rows(r), stem_rows(s), s.base + max(d for _, d in s.loop),
             r.base + max(d for _, d in r.loop)) + 2
    t = max(0, -(-(hi - r.base - min(d for _, d in r.loop)) // r.shift))
    k0 = len(r.stem) + t * len(r.loop)
    x = r.element(k0)
    # positions of s whose rows can reach row(x)
    ts = max(0, -(-(x[1] + 2 - s.base - min(d for _, d in s.loop)) // s.shift)) + 1
    n = s.index_of(x, len(s.stem) + (ts + 1) * len(s.loop))
    if n is None:
        return False
    w = lcm(len(r.loop), len(s.loop)) + 1
    return all(r.element(k0 + i) == s.element(n + i) for i in range(w))


def are_equivalent(m: MorseMatching, r: Ray, s: Ray) -> bool:
    validate_ray(m, r)
    validate_ray(m, s)
    return same_tail(r, s)


# bypasses


def _row_cap(m: MorseMatching, r: Ray, horizon: int) -> int:
    n = len(m.poset.pattern.qcells) * m.period
    top = max((row_of(r.element(k)) or 0) for k in range(horizon + 1))
    return top + n * n + 2 * n + 2


def find_bypass(m: MorseMatching, r: Ray, horizon: int, row_cap: int | None = None,
                min_row: int | None = None) -> Bypass | None:
    """First bypass (in search order) starting at an index below ``horizon``."""
    validate_ray(m, r)
    if horizon <= 0:
        return None
    cap = _row_cap(m, r, horizon) if row_cap is None else row_cap
    lo_row = min(d for _, d in r.loop) + r.base
    t = max(0, -(-(cap + 2 - lo_row) // r.shift)) + 1
    limit = len(r.stem) + (t + 1) * len(r.loop)
    index = {}
    for k in range(limit):
        index.setdefault(r.element(k), k)

    def allowed(z):
        row = row_of(z) if m.poset.is_tail(z) else None
        if row is None:
            return min_row is None
        return row <= cap and (min_row is None or row >= min_row)

    for j in range(horizon):
        x, nxt = r.element(j), r.element(j + 1)
        for y in modified_hasse_out(m, x):
            if y == nxt:
                continue
            if y in index:
                if index[y] > j:
                    return Bypass(j, index[y], (x, y))
                continue
            if not allowed(y):
                continue
            parent = {y: None}
            stack = [y]
            hit = None
            while stack and hit is None:
                a = stack.pop()
                for b in modified_hasse_out(m, a):
                    if b in parent or not allowed(b) and b not in index:
                        continue
                    parent[b] = a
                    if b in index:
                        hit = b
                        break
                    stack.append(b)
            if hit is not None and index[hit] > j:
                path = [hit]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.append(x)
                return Bypass(j, index[hit], tuple(reversed(path)))
    return None


def _is_path(m: MorseMatching, path) -> bool:
    try:
        return all(b in modified_hasse_out(m, a) for a, b in zip(path, path[1:]))
    except Exception:
        return False


def _generic_base(m: MorseMatching, loop, shift, phase_row) -> int:
    n = len(m.poset.pattern.qcells) * m.period
    lo = m.poset.start + 1 + n * n + 2 * n + 2 - min(d for _, d in loop)
    return lo + ((phase_row - lo) % shift)


def is_multiray(m: MorseMatching, r: Ray):
    """``(True, certificate)`` when a bypass in the periodic region recurs."""
    validate_ray(m, r)
    tail = _drop(r, len(r.stem))
    g = Ray(tail.loop, tail.shift, _generic_base(m, tail.loop, tail.shift, tail.base))
    return _certify(m, g)


def _certify(m: MorseMatching, g: Ray):
    validate_ray(m, g)
    b = find_bypass(m, g, len(g.loop), min_row=m.poset.start + 1)
    if b is None:
        return False, None
    moved = b.translated(g.shift, len(g.loop))
    ok = (_is_path(m, moved.path) and g.element(moved.start_index) == moved.path[0]
          and g.element(moved.end_index) == moved.path[-1])
    if not ok:
        return False, None
    return True, MultirayDetected(g, b, moved)


# enumeration


def _cycle_from_edges(m: MorseMatching, edges):
    """Lasso data (loop, shift, phase of node 0) for a quotient cycle."""
    poset = m.poset
    deg = poset.pattern.qdegree
    qidx = {q: i for i, q in enumerate(poset.pattern.qcells)}
    nodes = [a for a, _, _ in edges]
    ws = [w for _, _, w in edges]
    i0 = min(deg[q] for q, _ in nodes)
    cands = [k for k, (q, ph) in enumerate(nodes) if deg[q] == i0]
    k0 = min(cands, key=lambda k: (nodes[k][1], qidx[nodes[k][0]]))
    nodes = nodes[k0:] + nodes[:k0]
    ws = ws[k0:] + ws[:k0]
    loop, d = [], 0
    for (q, _ph), w in zip(nodes, ws):
        loop.append((q, d))
        d += w
    return tuple(loop), d, nodes[0][1], i0


def _shortest_cycle(comp) -> list:
    """A shortest cycle of a quotient component as ``[(node, next, weight)]``."""
    order = {n: i for i, n in enumerate(comp["nodes"])}
    dg = nx.DiGraph()
    for a, b, _, d in sorted(comp["edges"], key=lambda e: (order[e[0]], order[e[1]], e[2])):
        if not dg.has_edge(a, b):
            dg.add_edge(a, b, w=d["w"])
    for bound in range(1, len(order) + 1):
        cycles = [c for c in nx.simple_cycles(dg, length_bound=bound)]
        if cycles:
            best = min(cycles, key=lambda c: sorted(order[n] for n in c))
            return [(a, best[(i + 1) % len(best)], dg.edges[a, best[(i + 1) % len(best)]]["w"])
                    for i, a in enumerate(best)]
    raise InvalidRay("component has no cycle")


def _min_valid_base(m: MorseMatching, loop, shift, residue) -> int:
    lo = m.poset.start - min(d for _, d in loop)
    b = lo + ((residue - lo) % shift)
    for _ in range(64):
        try:
            validate_ray(m, Ray(loop, shift, b))
            return b
        except InvalidRay:
            b += shift
    raise InvalidRay("no valid lift of the quotient cycle near the prefix")


def enumerate_rays(m: MorseMatching, check: bool = True) -> RayClassSet:
    """Representatives of all ray classes, or a multiray certificate."""
    poset = m.poset
    if not poset.is_periodic:
        return RayClassSet()
    if check:
        verdict = is_acyclic(m)
        if not verdict.acyclic:
            raise NotAcyclic("H_M has a cycle: " + " -> ".join(format_elem(x) for x in verdict.witness))
    found = []
    multiray = None
    uncertified = []
    for comp in quotient_components(m):
        if comp["sign"] == 0:
            raise NotAcyclic("quotient of H_M has a closed walk with zero net shift")
        if comp["sign"] < 0:
            continue
        if len(comp["edges"]) == len(comp["nodes"]):
            succ = {a: (b, d["w"]) for a, b, _, d in comp["edges"]}
            start = comp["nodes"][0]
            cyc, a = [], start
            while True:
                b, w = succ[a]
                cyc.append((a, b, w))
                a = b
                if a == start:
                    break
            loop, shift, ph0, i0 = _cycle_from_edges(m, cyc)
            for k in range(shift // m.period):
                base = _min_valid_base(m, loop, shift, ph0 + k * m.period)
                found.append((i0, Ray(loop, shift, base)))
        elif multiray is None:
            loop, shift, ph0, _ = _cycle_from_edges(m, _shortest_cycle(comp))
            g = Ray(loop, shift, _generic_base(m, loop, shift, ph0))
            ok, cert = _certify(m, g)
            if ok:
                multiray = cert
            else:
                uncertified.append(tuple(comp["nodes"]))
    found.sort(key=lambda t: (t[0], t[1].key()))
    return RayClassSet(tuple(r for _, r in found), tuple(d for d, _ in found), multiray, tuple(uncertified))


# reversal


def _expand_selection(selection, old_p, new_p):
    return [(u, v, s, ph + k * old_p) for u, v, s, ph in selection for k in range(new_p // old_p)]


def reverse_ray(m: MorseMatching, r: Ray, horizon: int | None = None) -> MorseMatching:
    """Shift the matched pairs one step along ``r``; ``r[0]`` becomes critical."""
    poset = m.poset
    validate_ray(m, r)
    if not is_normalized(m, r):
        raise NotNormalized("the ray must start at an element of least degree matched with its successor")
    L = len(r.loop)
    if (len(r.stem) + L) % 2 or L % 2:
        raise InvalidRay("ray does not alternate between two degrees")
    if horizon is None:
        horizon = len(r.stem) + 3 * L
    b = find_bypass(m, r, horizon)
    if b is not None:
        raise HasBypass(f"bypass {' -> '.join(format_elem(x) for x in b.path)} starting at index {b.start_index}")

    stem_rows = [row_of(x) for x in r.stem if row_of(x) is not None]
    max_d = max(d for _, d in r.loop)
    new_start = max(poset.start, r.base + max_d - r.shift + 1, max(stem_rows, default=-1) + 1)
    unrolled = poset.unroll(new_start - poset.start)
    new_p = lcm(m.period, r.shift)

    prefix_set = set(unrolled.prefix)
    pairs = set()
    for x in unrolled.prefix:
        y = m.down_mate(x)
        if y is not None:
            pairs.add((x, y))
        z = m.up_mate(x)
        if z is not None:
            pairs.add((z, x))
    selection = set(_expand_selection(m.selection, m.period, new_p))

    # explicit part: pairs touching the new prefix
    k = 0
    while True:
        a, b_, c = r.element(2 * k), r.element(2 * k + 1), r.element(2 * k + 2)
        if not ({a, b_, c} & prefix_set):
            break
        if a in prefix_set or b_ in prefix_set:
            pairs.discard((b_, a))
        if b_ in prefix_set or c in prefix_set:
            pairs.add((b_, c))
        k += 1

    # periodic part: one entry per phase of every odd loop position
    first = len(r.stem)
    reps = new_p // r.shift
    for j in range(L):
        if (first + j) % 2 == 0:
            continue
        q, d = r.loop[j]
        qo, do = r.loop[j - 1] if j > 0 else (r.loop[-1][0], r.loop[-1][1] - r.shift)
        qn, dn = r.loop[j + 1] if j + 1 < L else (r.loop[0][0], r.loop[0][1] + r.shift)
        for t in range(reps):
            ph = (r.base + d + t * r.shift) % new_p
            old = (q, qo, do - d, ph)
            if old not in selection:
                raise InvalidRay(f"ray pair {q} > {qo} is not a selected arc at phase {ph}")
            selection.discard(old)
            selection.add((q, qn, dn - d, ph))

    key = unrolled.order_key
    new = build_matching(unrolled, sorted(pairs, key=lambda p: (key(p[0]), key(p[1]))), sorted(selection), new_p)
    verdict = is_acyclic(new)
    if not verdict.acyclic:
        raise AcyclicityLost("reversal created the cycle " + " -> ".join(format_elem(x) for x in verdict.witness))
    return new


def bypass_free_representative(m: MorseMatching, r: Ray, tries: int = 8) -> Ray:
    """Advance ``r`` by whole loop turns until no bypass is visible."""
    cur = _drop(r, len(r.stem)) if r.stem else r
    for _ in range(tries):
        if find_bypass(m, cur, 3 * len(cur.loop)) is None:
            return cur
        cur = cur.advanced(1)
    raise HasBypass(f"every tried representative of [{r.encoding()}] has a bypass")


@dataclass(frozen=True)
class ReversalStep:
    ray: Ray
    degree: int
    critical: object

    def as_dict(self) -> dict:
        return {"ray": self.ray.as_dict(), "degree": self.degree, "critical": format_elem(self.critical)}


def make_rayless(m: MorseMatching):
    """Reverse one representative per ray class until none remain.

    Returns ``(matching, steps)`` where each step records the reversed ray
    and its new critical element.
    """
    steps: list[ReversalStep] = []
    cur = m
    classes = enumerate_rays(cur)
    limit = len(classes) + 1
    while True:
        if classes.multiray is not None:
            raise MultirayPresent(classes.multiray.message, classes.multiray)
        if classes.uncertified:
            raise InfinitelyManyClasses("a quotient component carries several positive cycles "
                                        "but no recurring bypass was certified")
        if not classes.classes:
            break
        if len(steps) >= limit:
            raise InfinitelyManyClasses("ray reversal did not reduce the number of classes")
        r, deg = classes.classes[0], classes.degrees[0]
        r = bypass_free_representative(cur, r)
        cur = reverse_ray(cur, r)
        steps.append(ReversalStep(r, deg, r.element(0)))
        classes = enumerate_rays(cur)
    if not is_rayless(cur).rayless:
        raise InfinitelyManyClasses("matching still has rays after reversal")
    return cur, steps
