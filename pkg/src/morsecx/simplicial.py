"""Abstract simplicial complexes with a fixed vertex order."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable


@dataclass(frozen=True)
class SimplicialComplex:
    """A finite simplicial complex closed under taking faces.

    ``vertices`` fixes the vertex order used for orientations; simplices are
    stored as sorted tuples of vertex positions.
    """

    vertices: tuple
    simplices: frozenset = field(repr=False)

    def __post_init__(self):
        n = len(self.vertices)
        for s in self.simplices:
            if not s or list(s) != sorted(set(s)) or s[-1] >= n or s[0] < 0:
                raise ValueError(f"malformed simplex {s!r}")
            if len(s) > 1:
                for i in range(len(s)):
                    if s[:i] + s[i + 1 :] not in self.simplices:
                        raise ValueError(f"simplex {self.labels(s)} is missing a face")

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[Hashable]], vertices=None) -> "SimplicialComplex":
        facets = [tuple(f) for f in facets]
        if vertices is None:
            seen = {}
            for f in facets:
                for v in f:
                    seen.setdefault(v, None)
            try:
                vertices = tuple(sorted(seen))
            except TypeError:
                vertices = tuple(seen)
        vertices = tuple(vertices)
        index = {v: i for i, v in enumerate(vertices)}
        simplices = set()
        for f in facets:
            idx = tuple(sorted({index[v] for v in f}))
            for k in range(1, len(idx) + 1):
                simplices.update(combinations(idx, k))
        return cls(vertices, frozenset(simplices))

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def faces(self, k: int) -> list[tuple[int, ...]]:
        """The ``k``-simplices in lexicographic order of vertex positions."""
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def labels(self, s: tuple[int, ...]) -> tuple:
        return tuple(self.vertices[i] for i in s)

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.faces(k)) for k in range(self.dim + 1))

    def __len__(self) -> int:
        return len(self.simplices)


def simplex_id(labels: Iterable) -> str:
    """Stable string id for a simplex given by its (ordered) vertex labels."""
    return ".".join(str(v) for v in labels)
