"""Difference operators, the Gauss-Bonnet operator and non-parabolicity probes on weighted graphs."""

from .cochains import (
    Cochain0,
    Cochain1,
    Cutoff,
    Section,
    cutoff,
    inner0,
    inner1,
    inner_section,
    mean_value,
    multiply,
    norm0,
    norm1,
    norm_on,
    norm_section,
)
from .errors import *  # noqa: F401,F403
from .families import (
    FAMILIES,
    FamilySpec,
    dary_tree,
    electrical_weights,
    family_spec,
    grid,
    path_graph,
    ray,
    single_vertex,
    star_like,
    zline,
)
from .graph import (
    OrientedEdge,
    Region,
    WeightedGraph,
    ball,
    bfs_distances,
    build_graph,
    combinatorial_neighborhood,
    degree,
    edge_boundary,
    exhaustion,
    induced_edges,
    is_neighborhood,
    shortest_path,
    vertex_boundary,
)
from .lab import (
    ProbeReport,
    classical_capacity,
    delta_kernel_outside,
    lemma2_constant,
    neighbourhood_lower_bound,
    nonparabolicity_constant,
    place_U,
    probe_decay,
    triadic_witness,
    w_norm,
    w_norm_equivalence,
)
from .operators import (
    check_adjointness,
    commutator_chi_d,
    commutator_chi_delta,
    d,
    delta,
    derivation_d,
    derivation_delta,
    gauss_bonnet,
    operator_matrices,
)
from .spectral import (
    ConstraintMask,
    QuadraticForm,
    assemble_D_gram,
    min_rayleigh_constrained,
    smallest_singular_value,
)

__version__ = "0.1.0"
