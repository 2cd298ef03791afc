"""torind: exact Tor-independence and DG syzygy toolkit over F_p.

A desk-scale computational homological-algebra library: exact linear
algebra over a prime field, validated finite DG algebras, monomial
quotient rings with minimal free resolutions and Tor, semifree DG
modules with minimal semifree resolutions and derived tensor products,
and the syzygy-based bounds relating strongly Tor-independent families
to amp H(A) and to the embedding codepth.
"""

from .dgalgebra import (
    DGAlgebra,
    HomologyAlgebra,
    augmentation_power,
    exterior_algebra,
    homology_algebra,
    soft_truncate_algebra,
    validate_dg_algebra,
)
from .dgmod import (
    FiniteDGModule,
    HomologyProfile,
    SemifreeDGModule,
    check_strong_tor_independence_dg,
    derived_tensor_profile,
    expand,
    free_single_degree_check,
    homology_profile,
    minimal_semifree_resolution,
    semibasis_filtration,
    soft_truncate,
    tensor_over_A,
)
from .exactla import DEFAULT_PRIME, Matrix, Subspace, quotient_basis
from .ringkit import (
    BettiTable,
    FGModule,
    KoszulComplex,
    MonomialQuotientRing,
    check_strong_tor_independence,
    depth_and_ecodepth,
    koszul_complex,
    koszul_homology,
    make_ring,
    minimal_free_resolution,
    syzygy_module,
    tensor_modules,
    tor_dims,
)
from .theorem import (
    SyzygyPackage,
    TheoremReport,
    annihilation_check,
    base_case_pipeline,
    batch_syzygy_independence,
    regular_element_reduction,
    search_independent_families,
    syzygy_construction,
    verify_dg_theorem,
    verify_module_theorem,
    verify_syzygy_bounds,
    verify_syzygy_independence,
)

__version__ = "0.1.0"
