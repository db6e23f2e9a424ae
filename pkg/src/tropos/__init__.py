"""Tropical geometry over the integers and upper bounds for BNSR invariants."""

from .abelian import (
    Abelianization,
    FGAbelianGroup,
    Presentation,
    abelianize,
    parse_presentation,
    smith_normal_form,
)
from .alexander import (
    BnsFixture,
    ChainData,
    JumpIdeal,
    audit_inclusion,
    bnsr_upper_bound,
    dwyer_fried_test,
    fox_derivative,
    fox_matrix,
    jump_ideal,
    presentation_complex,
)
from .catalog import (
    OrbifoldData,
    WeightedGraph,
    jump_loci_wraag,
    kahler_classify,
    maximally_disconnected_subsets,
    orbifold_euler,
    orbifold_report,
    theta,
    wraag_presentation,
)
from .laurent import LaurentPoly, UndecidedTorsion, Valuation, parse_poly
from .polyhedra import UNKNOWN, Constraint, Polyhedron
from .sphere import SphericalSet
from .tropical import (
    Provenance,
    TropicalRegion,
    prevariety,
    pullback,
    sphere_project,
    trop_hypersurface_Z,
    trop_hypersurface_field,
    trop_Z_decomposition,
)

__version__ = "0.1.0"
