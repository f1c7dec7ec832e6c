"""Rotation and stretching of planar quasiconformal maps: model maps, branch
tracking, spectra, the nested-annuli construction, Burkholder functionals and a
grid Beltrami solver."""

from .beltrami import (ComplexGrid, FlowResult, beurling_transform, cauchy_transform,
                       compare_log_branches, solve_flow, solve_principal)
from .branches import (BranchTrace, ExponentEstimate, check_local_inequality,
                       estimate_exponents, track_branch)
from .burkholder import (burkholder_integral, complex_power_integral, power_integral_exponent,
                         solve_beta, solve_rho, verify_interpolation)
from .cantor import (CantorMap, box_counting_dimension, build_cantor_map, cantor_set_points,
                     eval_cantor_map, minkowski_spectrum_estimate, solve_cone_parameter)
from .core_maps import (Location, ModelMapParams, RegionSpec, minimal_distortion,
                        model_map_eval, region_contains)
from .errors import QCLabError
from .spectra import (bilip_spectrum, factoring_lower_bound, joint_spectrum, motion_dim_bound,
                      rotation_spectrum, sharp_bound)

__version__ = "0.1.0"
