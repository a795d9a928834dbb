"""Exact arithmetic for commuting endomorphism systems over Q.

Canonical heights with certified error radii, height-zero decision
procedures, bounded Fermat-property searches on pullback hypersurfaces,
threshold certificates, and density sieves, over K = Q throughout.
"""

from .elliptic import CurvePoint, DivisionPolynomials, WeierstrassCurve
from .fermat import (
    FermatReport,
    Hypersurface,
    KeyLemmaCertificate,
    bilinear_surface,
    certify_threshold,
    check_fermat_property,
    fermat_hyperplane,
    member_YN,
    search_points,
    verify_certificate_empirically,
)
from .heights import (
    CanonicalHeightResult,
    HeightDifferenceBound,
    HeightZeroCertificate,
    MinPositiveHeight,
    canonical_height,
    height_difference_bound,
    is_height_zero,
    min_positive_height,
    naive_height,
)
from .density import (
    DensityReport,
    PrimeSelection,
    SigmaOracle,
    assemble_M0,
    choose_primes,
    complement_bound,
    coprime_count,
    coprime_count_bound,
    empirical_density,
)
from .points import (
    MultiIndex,
    ProductPoint,
    ProjectivePoint,
    normalize,
    normalize_product,
)
from .systems import (
    EndoSystem,
    P1Morphism,
    chebyshev_poly,
    chebyshev_system,
    division_poly_multiple,
    iteration_system,
    lattes_system,
    p1_morphism,
    power_system,
    product_system,
    system_from_descriptor,
    verify_index_law,
)

__version__ = "0.1.0"
