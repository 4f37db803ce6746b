"""Geodesics, optimal synthesis and distances for radial Grushin structures on R^3."""

from .dynamics import (
    Covector,
    IntegratorOptions,
    Trajectory,
    angular_momentum,
    energy,
    integrate_cartesian,
    integrate_planar,
    integrate_variational,
    radial_momentum,
    z_w0_identity_check,
)
from .errors import GrushinError, InputFault, NumericalFault
from .grushin_r import (
    ClosedFormGeodesic,
    OscillationParams,
    closed_form_geodesic,
    conjugate_time,
    cut_time_and_locus,
    distance_r,
    first_jacobian_zero,
    jacobian_D,
    params_from_covector,
    params_from_extrema,
)
from .profile import (
    GridSpec,
    OddExtension,
    Profile,
    ValidationReport,
    builtin_profiles,
    f_inverse,
    h_inverse,
    parse_profile_spec,
    validate,
)
from .riemannian import (
    CylindricalGeodesic,
    conjectured_cut_time,
    experimental_conjugate_search,
    full_jacobian_fd,
    integrate_cylindrical,
    jacobian_reduced,
    sigma_hitting_time,
    straight_line_determinant_exact,
    straight_line_determinant_fd,
    symmetrize_covector,
)
from .singular import (
    DistanceResult,
    SynthesisResult,
    TurningPointData,
    ball_box_bounds,
    ball_boundary_from_sigma,
    calibrate_ball_box_constant,
    cut_from_sigma,
    distance_from_sigma,
    geodesic_from_sigma,
    period,
)

__version__ = "0.1.0"
