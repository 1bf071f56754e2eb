"""Discrete Morse complexes for finite and one-ended periodic graded posets."""

from __future__ import annotations

from .errors import MorseError
from .examples import get_example
from .homology import (FiniteChainComplex, HomologyGroups, IntegerMatrix, homology, morse_inequalities,
                       simplicial_homology, smith_normal_form)
from .incidence import IncidenceMap, compute_incidence
from .matching import (MorseMatching, build_matching, critical_cells, descent_digraph, is_acyclic,
                       is_rayless, l_M, m_plus, modified_hasse_out)
from .morse_complex import (ChainBoundaryOracle, GradientField, IntChain, morse_complex,
                            morse_differential_by_paths, pm_cell_counts, stabilize_flow,
                            synthesize_morse_function, verify_gradient_field, verify_morse_function)
from .poset import (FinitePoset, PeriodicPoset, QuotientPattern, build_finite_poset, build_pattern,
                    build_periodic_poset, down_set, face_poset, is_cellular, is_h_admissible, order_complex)
from .rays import (Ray, are_equivalent, enumerate_rays, find_bypass, is_multiray, make_rayless, ray_degree,
                   reverse_ray)
from .simplicial import SimplicialComplex

__all__ = [
    "MorseError",
    "get_example",
    "FiniteChainComplex",
    "HomologyGroups",
    "IntegerMatrix",
    "homology",
    "morse_inequalities",
    "simplicial_homology",
    "smith_normal_form",
    "IncidenceMap",
    "compute_incidence",
    "MorseMatching",
    "build_matching",
    "critical_cells",
    "descent_digraph",
    "is_acyclic",
    "is_rayless",
    "l_M",
    "m_plus",
    "modified_hasse_out",
    "ChainBoundaryOracle",
    "GradientField",
    "IntChain",
    "morse_complex",
    "morse_differential_by_paths",
    "pm_cell_counts",
    "stabilize_flow",
    "synthesize_morse_function",
    "verify_gradient_field",
    "verify_morse_function",
    "FinitePoset",
    "PeriodicPoset",
    "QuotientPattern",
    "build_finite_poset",
    "build_pattern",
    "build_periodic_poset",
    "down_set",
    "face_poset",
    "is_cellular",
    "is_h_admissible",
    "order_complex",
    "Ray",
    "are_equivalent",
    "enumerate_rays",
    "find_bypass",
    "is_multiray",
    "make_rayless",
    "ray_degree",
    "reverse_ray",
    "SimplicialComplex",
]

__version__ = "0.1.0"
