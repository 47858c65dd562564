"""Plane-wave virtual element solver for the 2D Helmholtz impedance problem.

The discretization couples lowest-order virtual element hat functions on
general polygonal meshes with per-vertex plane-wave enrichment, computes the
local Helmholtz form through an exactly-integrable projection onto centroid
plane waves, and stabilizes the projection kernel with a scaled wave mass
matrix.  PUM (full form) and GRAD (exact-gradient stabilization) reference
variants are available on triangular meshes.
"""

from .element import (
    LocalOperators,
    SingularElementError,
    UnsupportedVariantError,
    build_local_operators,
    infsup_reference,
    local_infsup_beta,
)
from .experiments import ExperimentConfig, run
from .mesh import (
    ElementGeometry,
    MeshError,
    MeshFormatError,
    PolygonalMesh,
    element_geometry,
    make_structured_triangular,
    make_voronoi,
    read_mesh,
    shape_diagnostics,
    write_mesh,
)
from .postproc import (
    ErrorReport,
    ExactSolution,
    bessel_singular_solution,
    hankel_solution,
    impedance_datum,
    l2_relative_error,
    plane_wave_combination,
    plane_wave_solution,
    rate_table,
)
from .pwcore import (
    DirectionSet,
    WaveContext,
    edge_hat_pw_integral,
    edge_pw_integral,
    equispaced_directions,
    polygon_pw_mass_integral,
)
from .system import (
    DiscreteSolution,
    DofMap,
    GlobalSystem,
    SolveError,
    assemble,
    assemble_rhs,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "DirectionSet",
    "DiscreteSolution",
    "DofMap",
    "ElementGeometry",
    "ErrorReport",
    "ExactSolution",
    "ExperimentConfig",
    "GlobalSystem",
    "LocalOperators",
    "MeshError",
    "MeshFormatError",
    "PolygonalMesh",
    "SingularElementError",
    "SolveError",
    "UnsupportedVariantError",
    "WaveContext",
    "assemble",
    "assemble_rhs",
    "bessel_singular_solution",
    "build_local_operators",
    "edge_hat_pw_integral",
    "edge_pw_integral",
    "element_geometry",
    "equispaced_directions",
    "hankel_solution",
    "impedance_datum",
    "infsup_reference",
    "l2_relative_error",
    "local_infsup_beta",
    "make_structured_triangular",
    "make_voronoi",
    "plane_wave_combination",
    "plane_wave_solution",
    "polygon_pw_mass_integral",
    "rate_table",
    "read_mesh",
    "run",
    "shape_diagnostics",
    "solve",
    "write_mesh",
]
