"""Exact cubical persistent homology on integer windows, random cubical
filtration models, and Monte Carlo estimation of their volume-scaled limits
(persistent-Betti densities, mean diagrams, log-moment-generating functions
and their convex conjugates), with deterministic gap diagnostics."""

from .cubes import (
    Box,
    ElementaryCube,
    SignedCube,
    Window,
    boundary_faces,
    cofaces_containing,
    cube_count_formula,
    cube_in_window,
    dimension,
    enumerate_cubes,
    faces_contained_in,
)
from .homology import (
    DEFAULT_FIELD,
    DEFAULT_PRIME,
    GF,
    PrimeField,
    RationalField,
    SparseMatrix,
    betti,
    boundary_matrix,
    kernel_basis,
    rank,
)
from .models import (
    DistributionSpec,
    ModelSpec,
    block_copy,
    block_window,
    covering_birth,
    format_filtration,
    parse_filtration,
    restrict,
    restrict_box,
    sample,
    sample_ball_cover,
    sample_box,
    sample_lower,
    sample_perturbed_lattice,
    sample_upper,
)
from .persistence import (
    Filtration,
    PersistenceDiagram,
    compute_diagram,
    format_diagram,
    parse_diagram,
    persistent_betti_direct,
    quadrant_mass,
    read_diagram,
    rectangle_mass,
    sublevel,
    validate,
    write_diagram,
)

__version__ = "0.1.0"
