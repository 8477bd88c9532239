"""Exact representation cohomology of finite posets over interval-module classes."""

__version__ = "0.1.0"

from .complex import (  # noqa: E402
    VirtualClass, build_complex, coboundary, coboundary_matrix, coface_matrix,
    codegeneracy_matrix, cup, morphism_components, nerve_comparison, nerve_complex,
    pullback_class, rank_invariant, restriction_to_nerve, singleton_complex, unit,
)
from .families import family  # noqa: E402
from .homology import (  # noqa: E402
    CochainComplex, CohomologyGroup, IntegerMatrix, cocycle_representatives,
    cohomology, cohomology_range, rank, smith_normal_form,
)
from .levels import Back, Degeneracy, Face, Front, Variant, degeneracy, face, level_poset, structure_map  # noqa: E402
from .poset import (  # noqa: E402
    Interval, Poset, composition_length, connected_components, enumerate_chains,
    enumerate_intervals, parse_poset, serialize_poset,
)
