from __future__ import annotations

import random

import pytest

from morsecx.simplicial import SimplicialComplex


def path_complex(n_edges: int) -> SimplicialComplex:
    """Vertices 0..n joined in a path."""
    return SimplicialComplex.from_facets([(i, i + 1) for i in range(n_edges)])


def line_truncation(rows: int) -> SimplicialComplex:
    """Two half-lines a_*, b_* glued at a common vertex c."""
    facets = [("c", "a0"), ("c", "b0")]
    for i in range(rows):
        facets += [(f"a{i}", f"a{i + 1}"), (f"b{i}", f"b{i + 1}")]
    return SimplicialComplex.from_facets(facets, vertices=sorted({v for f in facets for v in f}))


def cylinder_truncation(rows: int, n: int = 3) -> SimplicialComplex:
    facets = []
    for i in range(rows):
        for j in range(n):
            k = (j + 1) % n
            facets.append(((i, j), (i, k), (i + 1, j)))
            facets.append(((i, k), (i + 1, j), (i + 1, k)))
    return SimplicialComplex.from_facets(facets)


def random_complex(rng: random.Random, max_vertices: int = 7) -> SimplicialComplex:
    n = rng.randint(4, max_vertices)
    top = rng.choice([1, 2, 2, 2, 3])
    facets = []
    for _ in range(rng.randint(3, 14)):
        k = rng.randint(1, min(top, n - 1)) + 1
        facets.append(tuple(sorted(rng.sample(range(n), k))))
    used = {v for f in facets for v in f}
    facets += [(v,) for v in range(n) if v not in used and rng.random() < 0.5]
    return SimplicialComplex.from_facets(facets)


@pytest.fixture
def rng():
    return random.Random(20240601)


# acceptance bookkeeping: one line per criterion in the terminal summary
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {title} -- {detail}")
