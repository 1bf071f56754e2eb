"""Cellular chains, the gradient field V, the flow and the Morse complex."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (BudgetExceeded, InfiniteCriticalSet, InfinitelyManyClasses, MultirayPresent,
                     NotRayless, UnknownElement)
from .homology import FiniteChainComplex, IntegerMatrix
from .incidence import IncidenceMap, compute_incidence
from .matching import (MorseMatching, critical_cells, default_budget, is_rayless, l_M, m_plus)
from .poset import format_elem


class IntChain(Mapping):
    """Finite integer combination of elements of a single degree."""

    __slots__ = ("_terms", "degree")

    def __init__(self, terms: Mapping | Iterable = (), degree: int | None = None):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for x, c in items:
            if c:
                acc[x] = acc.get(x, 0) + c
        self._terms = {x: c for x, c in acc.items() if c}
        self.degree = degree if self._terms else None

    @classmethod
    def build(cls, poset, terms) -> "IntChain":
        ch = cls(terms)
        degs = {poset.degree(x) for x in ch}
        if len(degs) > 1:
            raise ValueError(f"chain mixes degrees {sorted(degs)}")
        ch.degree = degs.pop() if degs else None
        return ch

    def __getitem__(self, x) -> int:
        return self._terms.get(x, 0)

    def __iter__(self):
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, IntChain):
            return self._terms == other._terms
        if isinstance(other, Mapping):
            return self._terms == {k: v for k, v in other.items() if v}
        if other == 0:
            return not self._terms
        return NotImplemented

    __hash__ = None

    def __add__(self, other: "IntChain") -> "IntChain":
        acc = dict(self._terms)
        for x, c in other.items():
            acc[x] = acc.get(x, 0) + c
        return IntChain(acc, self.degree if self.degree is not None else other.degree)

    def __neg__(self) -> "IntChain":
        return IntChain({x: -c for x, c in self._terms.items()}, self.degree)

    def __sub__(self, other: "IntChain") -> "IntChain":
        return self + (-other)

    def __rmul__(self, k: int) -> "IntChain":
        return IntChain({x: k * c for x, c in self._terms.items()}, self.degree)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " ".join(f"{'+' if c > 0 else '-'}{abs(c) if abs(c) != 1 else ''}{format_elem(x)}"
                        for x, c in self._terms.items())

    def restrict(self, keep) -> "IntChain":
        return IntChain({x: c for x, c in self._terms.items() if keep(x)}, self.degree)

    def as_list(self, key=None) -> list:
        xs = sorted(self._terms, key=key) if key else list(self._terms)
        return [[format_elem(x), self._terms[x]] for x in xs]


ZERO = IntChain()


def chain_of(x, degree: int | None = None, coefficient: int = 1) -> IntChain:
    return IntChain({x: coefficient}, degree)


# boundary and gradient


class ChainBoundaryOracle:
    def __init__(self, poset, incidence: IncidenceMap | None = None):
        self.poset = poset
        self.incidence = compute_incidence(poset) if incidence is None else incidence
        self._cache: dict = {}

    def __call__(self, x) -> IntChain:
        ch = self._cache.get(x)
        if ch is None:
            if x not in self.poset:
                raise UnknownElement(f"unknown element {format_elem(x)}")
            deg = self.poset.degree(x)
            ch = IntChain({y: self.incidence.sign(x, y) for y in self.poset.covered_by(x)}, deg - 1)
            self._cache[x] = ch
        return ch

    def apply(self, c: IntChain) -> IntChain:
        acc: dict = {}
        for x, k in c.items():
            for y, e in self(x).items():
                acc[y] = acc.get(y, 0) + k * e
        return IntChain(acc, None if c.degree is None else c.degree - 1)


def boundary(oracle: ChainBoundaryOracle, x) -> IntChain:
    return oracle(x)


class GradientField:
    """``V(y) = eps(x, y) x`` when ``y`` is matched with ``x`` one degree up.

    This sign makes ``(1 - dV) y`` equal ``-sum eps(x, y) eps(x, y') y'``
    over ``y'`` in M_+(y), so the flow contracts along descent paths.
    """

    def __init__(self, matching: MorseMatching, incidence: IncidenceMap | None = None,
                 oracle: ChainBoundaryOracle | None = None):
        self.matching = matching
        self.oracle = oracle or ChainBoundaryOracle(matching.poset, incidence)
        self.incidence = self.oracle.incidence

    def __call__(self, y) -> IntChain:
        if y not in self.matching.poset:
            raise UnknownElement(f"unknown element {format_elem(y)}")
        x = self.matching.up_mate(y)
        if x is None:
            return ZERO
        return IntChain({x: self.incidence.sign(x, y)}, self.matching.poset.degree(x))

    def apply(self, c: IntChain) -> IntChain:
        acc: dict = {}
        for y, k in c.items():
            for x, e in self(y).items():
                acc[x] = acc.get(x, 0) + k * e
        return IntChain(acc, None if c.degree is None else c.degree + 1)

    def d(self, c: IntChain) -> IntChain:
        return self.oracle.apply(c)

    def flow(self, c: IntChain) -> IntChain:
        """One step of phi = 1 - dV - Vd."""
        return c - self.d(self.apply(c)) - self.apply(self.d(c))


def gradient(field: GradientField, y) -> IntChain:
    return field(y)


@dataclass(frozen=True)
class GradientReport:
    checked: int
    failures: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"checked": self.checked, "ok": self.ok, "failures": [list(f) for f in self.failures]}


def default_sample(matching: MorseMatching, rows: int | None = None) -> tuple:
    p = matching.poset
    if not p.is_periodic:
        return p.elements
    return p.window(p.start + 3 if rows is None else rows)


def verify_gradient_field(field: GradientField, sample: Iterable | None = None,
                          budget: int | None = None) -> GradientReport:
    """V^2 = 0, V(1 - dV)^(L+1) x = 0 and d phi = phi d on every sampled cell."""
    m = field.matching
    sample = default_sample(m) if sample is None else tuple(sample)
    failures = []
    memo: dict = {}
    for x in sample:
        vx = field(x)
        if field.apply(vx):
            failures.append((format_elem(x), "V(V(x)) != 0"))
        n = l_M(m, x, budget, memo)
        c = chain_of(x)
        for _ in range(n + 1):
            c = c - field.d(field.apply(c))
        if field.apply(c):
            failures.append((format_elem(x), f"V(1 - dV)^{n + 1} x != 0"))
        if field.d(field.flow(chain_of(x))) != field.flow(field.d(chain_of(x))):
            failures.append((format_elem(x), "d phi != phi d"))
    return GradientReport(len(sample), tuple(failures))


def stabilize_flow(field: GradientField, c, budget: int | None = None) -> IntChain:
    """Iterate phi until it fixes the chain."""
    if not isinstance(c, IntChain):
        c = chain_of(c, field.matching.poset.degree(c))
    if budget is None:
        budget = max(default_budget(field.matching, x) for x in c) if c else 1
    for _ in range(budget):
        nxt = field.flow(c)
        if nxt == c:
            return c
        if len(nxt) > budget:
            break
        c = nxt
    raise BudgetExceeded(f"flow did not stabilize within {budget} steps; the matching is probably not rayless")


# the Morse complex


def _generators(m: MorseMatching) -> dict:
    rep = critical_cells(m)
    if not rep.finite:
        cells = ", ".join(f"{q} (phase {ph})" for q, ph in rep.markers)
        raise InfiniteCriticalSet(f"critical in every row from {rep.from_row}: {cells}")
    return {d: tuple(xs) for d, xs in rep.by_degree.items()}


def _assemble(gens: dict, column) -> dict:
    bds = {}
    top = max(gens, default=-1)
    for n in range(1, top + 1):
        rows = {x: i for i, x in enumerate(gens.get(n - 1, ()))}
        entries = {}
        for j, c in enumerate(gens.get(n, ())):
            for y, k in column(c).items():
                if y in rows and k:
                    entries[(rows[y], j)] = k
        bds[n] = IntegerMatrix(len(rows), len(gens.get(n, ())), entries)
    return bds


def _ensure_rayless(matching: MorseMatching, incidence):
    from .rays import make_rayless

    if incidence is None:
        incidence = compute_incidence(matching.poset)
    steps = ()
    if matching.poset.is_periodic and not is_rayless(matching).rayless:
        matching, steps = make_rayless(matching)
    return matching, incidence, tuple(steps)


def morse_differential(field: GradientField, c, budget: int | None = None) -> IntChain:
    """Flow-based d-bar: critical part of d(phi^inf(c))."""
    m = field.matching
    stable = stabilize_flow(field, c, budget)
    return field.d(stable).restrict(lambda y: m.partner(y) is None)


def morse_differential_by_paths(matching: MorseMatching, incidence: IncidenceMap | None, c,
                                budget: int | None = None) -> IntChain:
    """d-bar by summing signed gradient paths from the faces of ``c``."""
    oracle = ChainBoundaryOracle(matching.poset, incidence)
    inc = oracle.incidence
    memo: dict = {}
    limit = default_budget(matching, c) if budget is None else budget

    def count(y, depth=0) -> IntChain:
        got = memo.get(y)
        if got is not None:
            return got
        if len(memo) > limit:
            raise BudgetExceeded(f"gradient paths from {format_elem(c)} exceed {limit} cells")
        if matching.partner(y) is None:
            res = chain_of(y)
        elif matching.up_mate(y) is None:
            res = ZERO
        else:
            x = matching.up_mate(y)
            e = inc.sign(x, y)
            res = ZERO
            for y2 in m_plus(matching, y):
                res = res + (-e * inc.sign(x, y2)) * count(y2, depth + 1)
        memo[y] = res
        return res

    total = ZERO
    for y, e in oracle(c).items():
        total = total + e * _iter_count(count, y)
    return total


def _iter_count(count, y):
    """Evaluate ``count`` bottom-up so long descent chains do not recurse deeply."""
    import sys

    depth = sys.getrecursionlimit()
    try:
        sys.setrecursionlimit(max(depth, 20000))
        return count(y)
    finally:
        sys.setrecursionlimit(depth)


def morse_complex(matching: MorseMatching, incidence: IncidenceMap | None = None, *,
                  budget: int | None = None, method: str = "flow") -> FiniteChainComplex:
    """Morse complex on the critical cells of a rayless matching.

    A matching with finitely many ray classes is made rayless first; the
    generators created that way carry a ``ray`` provenance tag.
    """
    m, incidence, steps = _ensure_rayless(matching, incidence)
    gens = _generators(m)
    field = GradientField(m, incidence)
    origin = {s.critical: s.ray.encoding() for s in steps}
    if method == "flow":
        bds = _assemble(gens, lambda c: morse_differential(field, c, budget))
    elif method == "paths":
        bds = _assemble(gens, lambda c: morse_differential_by_paths(m, field.incidence, c, budget))
    else:
        raise ValueError(f"unknown method {method!r}")
    prov = {x: ({"origin": "ray", "ray": origin[x]} if x in origin else {"origin": "critical"})
            for xs in gens.values() for x in xs}
    cx = FiniteChainComplex(gens, bds, prov)
    cx.check()
    return cx


def rayless_matching(matching: MorseMatching):
    """``(rayless matching, reversal steps)``; steps are empty when nothing was reversed."""
    m, _, steps = _ensure_rayless(matching, IncidenceMap())
    return m, steps


# discrete Morse functions


@dataclass(frozen=True)
class DiscreteMorseFunction:
    values: Mapping
    window: tuple = ()

    def __call__(self, x) -> Fraction:
        return self.values[x]

    def lines(self) -> list[str]:
        out = []
        for x in self.window:
            v = Fraction(self.values[x])
            out.append(f"{format_elem(x)} {v.numerator}/{v.denominator}")
        return out


def _strata(m: MorseMatching, budget):
    memo: dict = {}

    def s(x) -> int:
        if x in memo:
            return memo[x]
        if m.up_mate(x) is None:
            memo[x] = 0
            return 0
        # iterative post-order over M_+
        stack = [x]
        steps = 0
        while stack:
            y = stack[-1]
            if y in memo:
                stack.pop()
                continue
            todo = [z for z in m_plus(m, y) if z not in memo]
            if todo:
                steps += 1
                if steps > budget:
                    raise BudgetExceeded(f"descent from {format_elem(x)} exceeded {budget} steps")
                stack.extend(todo)
                continue
            stack.pop()
            if m.up_mate(y) is None:
                memo[y] = 0
            else:
                memo[y] = 1 + max((memo[z] for z in m_plus(m, y)), default=0)
        return memo[x]

    return s


def synthesize_morse_function(matching: MorseMatching, window: int | None = None,
                              budget: int | None = None) -> DiscreteMorseFunction:
    """Self-indexing discrete Morse function inducing ``matching``.

    A cell x of degree i matched upward with stratum n gets
    ``i + 1 - 4**-n``; its partner gets ``i + 1 - 2 * 4**-n``; critical cells
    get their degree.
    """
    if not is_rayless(matching).rayless:
        raise NotRayless("the matching has decreasing rays; reverse them first")
    poset = matching.poset
    elems = poset.window(window) if poset.is_periodic else poset.elements
    limit = budget if budget is not None else default_budget(matching, elems[-1] if elems else None) * 4
    s = _strata(matching, limit)

    def value(x) -> Fraction:
        i = poset.degree(x)
        if matching.up_mate(x) is not None:
            return i + 1 - Fraction(1, 4 ** s(x))
        y = matching.down_mate(x)
        if y is not None:
            return i - 2 * Fraction(1, 4 ** s(y))
        return Fraction(i)

    values = {}
    for x in elems:
        values[x] = value(x)
        for z in poset.covering(x):
            if z not in values:
                values[z] = value(z)
    return DiscreteMorseFunction(values, tuple(elems))


@dataclass(frozen=True)
class MorseFunctionReport:
    checked: int
    violations: tuple
    pairs: tuple
    critical: tuple
    round_trip: bool | None = None

    @property
    def ok(self) -> bool:
        return not self.violations and self.round_trip is not False

    def as_dict(self) -> dict:
        return {"checked": self.checked, "ok": self.ok, "round_trip": self.round_trip,
                "violations": [list(v) for v in self.violations],
                "pairs": [[format_elem(a), format_elem(b)] for a, b in self.pairs],
                "critical": [format_elem(x) for x in self.critical]}


def verify_morse_function(f, poset, window=None, matching: MorseMatching | None = None) -> MorseFunctionReport:
    """Check |u_f| <= 1, |d_f| <= 1 (not both nonempty) on the window and
    recover the induced matching."""
    values = f.values if isinstance(f, DiscreteMorseFunction) else f
    if window is None:
        window = f.window if isinstance(f, DiscreteMorseFunction) and f.window else tuple(values)
    elif isinstance(window, int):
        window = poset.window(window)
    violations, pairs, critical = [], [], []
    partner = {}
    for x in window:
        fx = values[x]
        missing = [z for z in (*poset.covering(x), *poset.covered_by(x)) if z not in values]
        if missing:
            violations.append((format_elem(x), f"f undefined at {format_elem(missing[0])}"))
            continue
        up = [z for z in poset.covering(x) if values[z] <= fx]
        down = [y for y in poset.covered_by(x) if values[y] >= fx]
        if len(up) > 1:
            violations.append((format_elem(x), f"|u_f| = {len(up)}"))
        if len(down) > 1:
            violations.append((format_elem(x), f"|d_f| = {len(down)}"))
        if up and down:
            violations.append((format_elem(x), "u_f and d_f both nonempty"))
        if len(up) == 1:
            partner[x] = up[0]
            pairs.append((up[0], x))
        elif len(down) == 1:
            partner[x] = down[0]
        elif not up and not down:
            critical.append(x)
    round_trip = None
    if matching is not None:
        round_trip = all(partner.get(x) == matching.partner(x) for x in window)
    return MorseFunctionReport(len(window), tuple(violations), tuple(pairs), tuple(critical), round_trip)


# cell counts of the complex built from critical cells and ray classes


@dataclass(frozen=True)
class CellCounts:
    critical: tuple
    rays: tuple

    @property
    def total(self) -> tuple:
        n = max(len(self.critical), len(self.rays))
        c = self.critical + (0,) * (n - len(self.critical))
        r = self.rays + (0,) * (n - len(self.rays))
        return tuple(a + b for a, b in zip(c, r))

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** n * k for n, k in enumerate(self.total))

    def as_dict(self) -> dict:
        return {"critical": list(self.critical), "rays": list(self.rays), "total": list(self.total),
                "euler_characteristic": self.euler_characteristic}


def pm_cell_counts(matching: MorseMatching) -> CellCounts:
    from .rays import enumerate_rays

    rep = critical_cells(matching)
    if not rep.finite:
        raise InfiniteCriticalSet("infinitely many critical cells; counts are not finite")
    classes = enumerate_rays(matching)
    if classes.multiray is not None:
        raise MultirayPresent(classes.multiray.message, classes.multiray)
    if classes.uncertified:
        raise InfinitelyManyClasses("ray classes could not be counted")
    top = max([poset_top(matching.poset), *rep.by_degree, *classes.degrees], default=-1)
    return CellCounts(rep.counts(top), classes.counts(top))


def poset_top(poset) -> int:
    return poset.max_degree
