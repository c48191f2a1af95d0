"""Exact simplicial and Cech cohomology of finite complexes and covering towers.

The package computes cohomology of finite simplicial complexes and pairs with
Z/p^s coefficients, models towers of Galois covering complexes, and verifies
at desk scale the finite-level identities relating Cech and simplicial
cohomology, the bi-indexed systems behind completed cohomology, and the long
exact sequence of a pair.
"""

from .residue import Modulus, NotAUnitError, ResidueElement
from .linalg import (
    ModuleInvariants,
    ResidueMatrix,
    SNFResult,
    cokernel_invariants,
    kernel_basis,
    smith_normal_form,
    solve_in_image,
)
from .cochain import CochainComplex, CohomologyPresentation, presentation
from .simplicial import (
    Pair,
    SimplicialComplex,
    SimplicialMap,
    coboundary_matrix,
    cochain_complex,
    cohomology,
    disjoint_union,
    induced_map,
    product_with_finite_set,
)
from .cech import (
    ConstantPresheaf,
    PullbackCover,
    RelativizedPresheaf,
    StarCover,
    cech_cohomology,
    cech_complex,
    leray_comparison,
    presheaf_les,
)
from .tower import (
    BiIndexedReport,
    DirectedSystem,
    Tower,
    cohomology_system,
    colimit_classification,
    completed_report,
    main_theorem_check,
    pullback_cover,
    validate_tower,
)
from .les import (
    ExactSequenceNode,
    assemble_les,
    certify_exact,
    completed_les_check,
    connecting_map,
)
from .generators import GeneratorSpec, build

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
