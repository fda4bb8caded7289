"""Numerical laboratory for lambda-self-expander hypersurfaces."""
from .errors import *  # noqa: F401,F403
from .geometry import (ExpanderSpec, GeomJet, GridGeometry, ImmersedPatch, JetField,
                       ParamGrid, evaluate_jet, expander_residual, fd_jet_field,
                       laplace_beltrami, surface_gradient)
from .canonical import (CanonicalSurface, make_cylinder, make_hyperplane, make_sphere,
                        radii_for_lambda)
from .profile import (ProfilePath, ProfileState, RevolvedSurface, ShootingResult,
                      integrate_from, integrate_profile, planar_curve, profile_rhs, revolve,
                      shoot_closed)
from .drifted import (ResidualReport, drifted_L, drifted_L_alpha, norm_identity_consistency,
                      parallel_A_identity_check, scalar_identity_residuals)
from .rigidity import (ConditionReport, check_cmc_identity, check_cylinder_conditions,
                       check_gap_lambda, check_huiss_condition, check_mean_convex_condition,
                       check_pinching, check_smoczyk_conditions, check_sphere_condition,
                       check_tu_condition, check_weighted_norm_condition, eigen_identity)
from .measure import (AreaSeries, GrowthFit, LinearBound, area_series, ball_area, growth_fit,
                      mean_curvature_linear_bound, weighted_area, weighted_H_integral)

__version__ = "0.1.0"
