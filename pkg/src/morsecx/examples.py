"""Built-in example complexes with fixed matchings and known answers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownExample
from .matching import MorseMatching, build_matching, greedy_collapse_matching
from .poset import build_pattern, build_periodic_poset, face_poset
from .simplicial import SimplicialComplex, simplex_id

RP2_FACETS = ((1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2),
              (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4))


def torus7_facets() -> list[tuple[int, ...]]:
    out = []
    for i in range(7):
        out.append((i, (i + 1) % 7, (i + 3) % 7))
        out.append((i, (i + 2) % 7, (i + 3) % 7))
    return out


@dataclass(frozen=True)
class Example:
    name: str
    description: str
    poset: object
    matching: MorseMatching
    expected: dict = field(default_factory=dict)
    complex: SimplicialComplex | None = None


def halfline_poset():
    pattern = build_pattern([("v", 0), ("e", 1)], [("e", "v", 0), ("e", "v", 1)])
    return build_periodic_poset(pattern)


def _halfline_ray() -> Example:
    p = halfline_poset()
    m = build_matching(p, selection=[("e", "v", 0)])
    return Example("halfline_ray", "half-line [0, inf) with e_n matched to v_n: one decreasing ray, no critical cells",
                   p, m, {"ray_classes": [1], "critical": [0], "generators": [1], "betti": [1, 0], "torsion": [[], []]})


def _halfline_rayless() -> Example:
    p = halfline_poset()
    m = build_matching(p, selection=[("e", "v", 1)])
    return Example("halfline_rayless", "half-line with e_n matched to v_(n+1): rayless, v_0 critical",
                   p, m, {"ray_classes": [], "critical": [1], "generators": [1], "betti": [1, 0], "torsion": [[], []]})


def line_poset():
    pattern = build_pattern([("a", 0), ("ea", 1), ("b", 0), ("eb", 1)],
                            [("ea", "a", 0), ("ea", "a", 1), ("eb", "b", 0), ("eb", "b", 1)])
    return build_periodic_poset(pattern, ["c", "fa", "fb"], prefix_covers=[("fa", "c"), ("fb", "c")],
                                glue=[("fa", ("a", 1)), ("fb", ("b", 1))], start=1)


def _line_two_ends() -> Example:
    p = line_poset()
    m = build_matching(p, [("fa", "c")], [("ea", "a", 0), ("eb", "b", 0)])
    return Example("line_two_ends", "real line folded at c into two half-lines a and b; both ends carry a ray",
                   p, m, {"ray_classes": [2], "critical": [0, 1], "generators": [2, 1],
                          "betti": [1, 0], "torsion": [[], []]})


def cylinder_pattern(n: int = 3):
    cells, arcs = [], []
    cells += [(f"v{j}", 0) for j in range(n)]
    cells += [(f"h{j}", 1) for j in range(n)]
    cells += [(f"u{j}", 1) for j in range(n)]
    cells += [(f"f{j}", 2) for j in range(n)]
    for j in range(n):
        k = (j + 1) % n
        arcs += [(f"h{j}", f"v{j}", 0), (f"h{j}", f"v{k}", 0)]
        arcs += [(f"u{j}", f"v{j}", 0), (f"u{j}", f"v{j}", 1)]
        arcs += [(f"f{j}", f"h{j}", 0), (f"f{j}", f"h{j}", 1), (f"f{j}", f"u{j}", 0), (f"f{j}", f"u{k}", 0)]
    return build_pattern(cells, arcs)


def cylinder_poset(n: int = 3):
    return build_periodic_poset(cylinder_pattern(n))


def _cylinder() -> Example:
    p = cylinder_poset()
    sel = [(f"u{j}", f"v{j}", 0) for j in range(3)] + [(f"f{j}", f"h{j}", 0) for j in range(3)]
    m = build_matching(p, selection=sel)
    return Example("cylinder", "square-celled cylinder S^1 x [0, inf) matched along the axis: "
                   "three rays of degree 0 and three of degree 1",
                   p, m, {"ray_classes": [3, 3], "critical": [0, 0], "generators": [3, 3, 0],
                          "betti": [1, 1, 0], "torsion": [[], [], []]})


def cylinder_rayless_matching(p=None) -> MorseMatching:
    """Axis collapse toward the boundary circle: row 0 stays critical."""
    p = p or cylinder_poset()
    sel = [(f"u{j}", f"v{j}", 1) for j in range(3)] + [(f"f{j}", f"h{j}", 1) for j in range(3)]
    return build_matching(p, selection=sel)


def ladder_poset():
    cells = [("a", 0), ("b", 0), ("ea", 1), ("eb", 1), ("e", 1), ("h", 1), ("f", 2), ("G", 2)]
    arcs = [("ea", "a", 0), ("ea", "a", 1), ("eb", "b", 0), ("eb", "b", 1),
            ("e", "a", 0), ("e", "b", 0), ("h", "a", 0), ("h", "b", 1),
            ("f", "e", 0), ("f", "ea", 0), ("f", "e", 1), ("f", "eb", 0),
            ("G", "ea", 0), ("G", "e", 1), ("G", "h", 0)]
    return build_periodic_poset(build_pattern(cells, arcs))


def _bypass_ladder() -> Example:
    p = ladder_poset()
    m = build_matching(p, selection=[("f", "e", 0), ("G", "ea", 0), ("h", "a", 0), ("eb", "b", 0)])
    return Example("bypass_ladder", "ladder of squares with a diagonal triangle per square; the edge ray "
                   "e -> f -> e has a bypass through the triangle in every row (multiray)",
                   p, m, {"multiray": True, "exit_code": 3})


def _finite(name, description, sc: SimplicialComplex, expected, matching=None) -> Example:
    p = face_poset(sc)
    m = greedy_collapse_matching(p) if matching is None else matching(p)
    return Example(name, description, p, m, expected, sc)


def _cone_matching(p):
    apex = "1"
    pairs = []
    for x in p.elements:
        labels = x.split(".")
        if apex not in labels:
            pairs.append((simplex_id(sorted(labels + [apex], key=int)), x))
    return build_matching(p, pairs)


def _rp2() -> Example:
    sc = SimplicialComplex.from_facets(RP2_FACETS)
    return _finite("rp2", "6-vertex real projective plane, greedy collapse matching", sc,
                   {"f_vector": [6, 15, 10], "betti": [1, 0, 0], "torsion": [[], [2], []]})


def _torus7() -> Example:
    sc = SimplicialComplex.from_facets(torus7_facets())
    return _finite("torus7", "7-vertex torus, greedy collapse matching", sc,
                   {"f_vector": [7, 21, 14], "betti": [1, 2, 1], "torsion": [[], [], []]})


def _s2_tetra() -> Example:
    sc = SimplicialComplex.from_facets([(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)])
    return _finite("s2_tetra", "boundary of the tetrahedron, greedy collapse matching", sc,
                   {"f_vector": [4, 6, 4], "betti": [1, 0, 1], "torsion": [[], [], []]})


def _delta2_cone() -> Example:
    sc = SimplicialComplex.from_facets([(1, 2, 3)])
    return _finite("delta2_cone", "solid triangle with the cone matching from vertex 1", sc,
                   {"f_vector": [3, 3, 1], "critical": [1, 0, 0], "generators": [1, 0, 0],
                    "betti": [1, 0, 0], "torsion": [[], [], []]}, _cone_matching)


BUILDERS = {
    "halfline_ray": _halfline_ray,
    "halfline_rayless": _halfline_rayless,
    "line_two_ends": _line_two_ends,
    "cylinder": _cylinder,
    "bypass_ladder": _bypass_ladder,
    "rp2": _rp2,
    "torus7": _torus7,
    "s2_tetra": _s2_tetra,
    "delta2_cone": _delta2_cone,
}

NAMES = tuple(BUILDERS)


def get_example(name: str) -> Example:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; choose one of {', '.join(NAMES)}") from None
