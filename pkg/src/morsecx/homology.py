"""Exact integer homology: Smith normal form, chain complexes, Morse inequalities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from . import _kernels
from .errors import NotAComplex, SideConditionViolated
from .simplicial import SimplicialComplex


@dataclass(frozen=True)
class IntegerMatrix:
    """Sparse integer matrix; ``entries`` holds only nonzero values."""

    rows: int
    cols: int
    entries: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
            if v:
                clean[(i, j)] = int(v)
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntegerMatrix":
        rows = [list(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if m else (ncols or 0)
        return cls(m, n, {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def triples(self) -> list[tuple[int, int, int]]:
        return sorted((i, j, v) for (i, j), v in self.entries.items())

    def is_zero(self) -> bool:
        return not self.entries

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.entries.get(ij, 0)

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        acc: dict[tuple[int, int], int] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                acc[(i, j)] = acc.get((i, j), 0) + a * b
        return IntegerMatrix(self.rows, other.cols, acc)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)


class SmithForm(NamedTuple):
    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix

    @property
    def divisors(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.shape)) if self.D[i, i]]


def smith_normal_form(A: IntegerMatrix | Sequence[Sequence[int]]) -> SmithForm:
    """Factor ``A = U @ D @ V`` with ``U``, ``V`` unimodular and ``D`` in
    Smith normal form (nonnegative diagonal, each entry dividing the next).

    Pivoting always picks a smallest nonzero entry of the remaining block.
    """
    if not isinstance(A, IntegerMatrix):
        A = IntegerMatrix.from_dense(A)
    m, n = A.shape
    D = A.to_dense()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        D[i], D[k] = D[k], D[i]
        for row in U:
            row[i], row[k] = row[k], row[i]

    def swap_cols(j, k):
        for row in D:
            row[j], row[k] = row[k], row[j]
        V[j], V[k] = V[k], V[j]

    def add_row(dst, src, q):  # D[dst] += q * D[src]
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        for row in U:
            row[src] -= q * row[dst]

    def add_col(dst, src, q):  # D[:, dst] += q * D[:, src]
        for row in D:
            row[dst] += q * row[src]
        V[src] = [a - q * b for a, b in zip(V[src], V[dst])]

    t = 0
    while t < min(m, n):
        block = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not block:
            break
        _, i, j = min(block)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
            rem = [(abs(D[i][t]), i) for i in range(t + 1, m) if D[i][t]]
            if rem:
                swap_rows(t, min(rem)[1])
                continue
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
            rem = [(abs(D[t][j]), j) for j in range(t + 1, n) if D[t][j]]
            if rem:
                swap_cols(t, min(rem)[1])
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is not None:
                add_row(t, bad, 1)
                continue
            break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            for row in U:
                row[t] = -row[t]
        t += 1
    return SmithForm(IntegerMatrix.from_dense(U, m), IntegerMatrix.from_dense(D, n), IntegerMatrix.from_dense(V, n))


def determinant(M: IntegerMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n, n2 = M.shape
    if n != n2:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = M.to_dense()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def invariant_factors(A: IntegerMatrix, backend: str | None = None) -> list[int]:
    """Nonzero Smith invariants of ``A`` via the accelerated kernels."""
    if A.rows == 0 or A.cols == 0 or not A.entries:
        return []
    return _kernels.diagonal(A.to_dense(), backend)[0]


# chain complexes


@dataclass(frozen=True)
class FiniteChainComplex:
    """Free chain complex with named generators.

    ``boundaries[n]`` maps degree ``n`` to degree ``n - 1``: rows are indexed
    by ``generators[n - 1]``, columns by ``generators[n]``.
    """

    generators: Mapping[int, tuple]
    boundaries: Mapping[int, IntegerMatrix]
    provenance: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for n, mat in self.boundaries.items():
            expect = (len(self.generators.get(n - 1, ())), len(self.generators.get(n, ())))
            if mat.shape != expect:
                raise ValueError(f"boundary {n} has shape {mat.shape}, expected {expect}")

    @property
    def top(self) -> int:
        return max((n for n, g in self.generators.items() if g), default=-1)

    def rank_vector(self) -> tuple[int, ...]:
        return tuple(len(self.generators.get(n, ())) for n in range(self.top + 1))

    def boundary(self, n: int) -> IntegerMatrix:
        if n in self.boundaries:
            return self.boundaries[n]
        return IntegerMatrix(len(self.generators.get(n - 1, ())), len(self.generators.get(n, ())))

    def check(self) -> None:
        for n in range(1, self.top + 1):
            prod = self.boundary(n) @ self.boundary(n + 1)
            if not prod.is_zero():
                raise NotAComplex(f"d_{n} o d_{n + 1} != 0 ({len(prod.entries)} nonzero entries)")


@dataclass(frozen=True)
class HomologyGroups:
    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.betti) != len(self.torsion):
            raise ValueError("betti and torsion lengths differ")
        for ts in self.torsion:
            if any(t < 2 for t in ts) or any(b % a for a, b in zip(ts, ts[1:])):
                raise ValueError(f"bad torsion coefficients {ts}")

    @classmethod
    def of(cls, betti: Sequence[int], torsion: Mapping[int, Sequence[int]] | None = None) -> "HomologyGroups":
        torsion = torsion or {}
        top = max([len(betti) - 1, *torsion.keys()], default=-1)
        b = list(betti) + [0] * (top + 1 - len(betti))
        t = [tuple(torsion.get(n, ())) for n in range(top + 1)]
        return cls(tuple(b), tuple(t)).trimmed()

    def trimmed(self) -> "HomologyGroups":
        b, t = list(self.betti), list(self.torsion)
        while b and b[-1] == 0 and not t[-1]:
            b.pop()
            t.pop()
        return HomologyGroups(tuple(b), tuple(t))

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * b for n, b in enumerate(self.betti))

    def group(self, n: int) -> str:
        if n >= len(self.betti):
            return "0"
        parts = []
        b = self.betti[n]
        if b == 1:
            parts.append("Z")
        elif b > 1:
            parts.append(f"Z^{b}")
        parts += [f"Z/{t}" for t in self.torsion[n]]
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return "\n".join(f"H_{n} = {self.group(n)}" for n in range(len(self.betti))) or "H_* = 0"

    def as_dict(self) -> dict:
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion]}


def homology(complex: FiniteChainComplex, backend: str | None = None) -> HomologyGroups:
    complex.check()
    top = complex.top
    factors = {n: invariant_factors(complex.boundary(n), backend) for n in range(1, top + 2)}
    betti, torsion = [], []
    for n in range(top + 1):
        dim = len(complex.generators.get(n, ()))
        rank_out = len(factors.get(n, ()))
        rank_in = len(factors.get(n + 1, ()))
        betti.append(dim - rank_out - rank_in)
        torsion.append(tuple(d for d in factors.get(n + 1, ()) if d > 1))
    return HomologyGroups(tuple(betti), tuple(torsion)).trimmed()


def simplicial_chain_complex(sc: SimplicialComplex) -> FiniteChainComplex:
    """Simplicial chains with orientation given by the vertex order."""
    gens = {k: tuple(sc.faces(k)) for k in range(sc.dim + 1)}
    bds = {}
    for k in range(1, sc.dim + 1):
        index = {s: i for i, s in enumerate(gens[k - 1])}
        entries = {}
        for j, s in enumerate(gens[k]):
            for i in range(len(s)):
                entries[(index[s[:i] + s[i + 1 :]], j)] = (-1) ** i
        bds[k] = IntegerMatrix(len(gens[k - 1]), len(gens[k]), entries)
    return FiniteChainComplex(gens, bds)


def simplicial_homology(sc: SimplicialComplex, backend: str | None = None) -> HomologyGroups:
    return homology(simplicial_chain_complex(sc), backend)


# Morse inequalities


@dataclass(frozen=True)
class MorseInequalityReport:
    m: tuple
    r: tuple
    b: tuple[int, ...]
    weak: tuple  # per N: True/False, or None when not checkable
    strong: tuple
    euler: bool | None
    side_conditions: tuple[str, ...]

    @property
    def consistent(self) -> bool:
        checks = [v for v in (*self.weak, *self.strong, self.euler) if v is not None]
        return all(checks)

    def as_dict(self) -> dict:
        return {
            "m": list(self.m),
            "r": list(self.r),
            "b": list(self.b),
            "weak": list(self.weak),
            "strong": list(self.strong),
            "euler": self.euler,
            "side_conditions": list(self.side_conditions),
            "consistent": self.consistent,
        }


def _finite(x) -> bool:
    return x is not None and x != float("inf")


def morse_inequalities(m: Sequence, r: Sequence, b: HomologyGroups | Sequence[int], strict: bool = False) -> MorseInequalityReport:
    """Weak, strong and Euler forms of the Morse inequalities.

    ``m[i]`` counts critical ``i``-cells and ``r[i]`` ray classes of degree
    ``i``; ``None`` or ``inf`` marks an infinite count. Checks whose side
    conditions fail are reported as ``None`` (or raise with ``strict``).
    """
    betti = tuple(b.betti) if isinstance(b, HomologyGroups) else tuple(b)
    top = max(len(m), len(r), len(betti))
    mm = list(m) + [0] * (top - len(m))
    rr = list(r) + [0] * (top - len(r))
    bb = list(betti) + [0] * (top - len(betti))
    notes = []

    weak = []
    for N in range(top):
        if _finite(mm[N]) and _finite(rr[N]):
            weak.append(bb[N] <= mm[N] + rr[N])
        else:
            weak.append(True)  # an infinite right-hand side bounds anything

    strong = []
    for N in range(top):
        if not all(_finite(mm[i]) and _finite(rr[i]) for i in range(N + 1)):
            strong.append(None)
            notes.append(f"strong N={N}: infinite m_i or r_i for some i <= N")
            continue
        lhs = sum((-1) ** (N - i) * (mm[i] + rr[i]) for i in range(N + 1))
        rhs = sum((-1) ** (N - i) * bb[i] for i in range(N + 1))
        strong.append(lhs >= rhs)

    if all(_finite(x) for x in (*mm, *rr)):
        euler = sum((-1) ** i * (mm[i] + rr[i]) for i in range(top)) == sum((-1) ** i * bb[i] for i in range(top))
    else:
        euler = None
        notes.append("euler: some count is infinite")

    if strict and notes:
        raise SideConditionViolated("; ".join(notes))
    return MorseInequalityReport(tuple(mm), tuple(rr), tuple(bb), tuple(weak), tuple(strong), euler, tuple(notes))
