"""Boundary integral solver for the Yukawa-Beltrami equation on the unit sphere.

Solves the homogeneous Dirichlet problem (-Laplace_S + k^2) u = 0 on
multiply-connected domains bounded by smooth closed curves, via a
double-layer ansatz built on a conical-function fundamental solution and a
Nystrom discretization of the resulting second-kind Fredholm equation.
"""

from .bie import (Density, NystromSystem, assemble, condition_and_spectrum,
                  dlp_kernel, gmres_solve)
from .geometry import (BoundaryGeometry, SphereCurve, SpherePoint, build_curve,
                       build_curve_from_nodes, diag_kernel_limit,
                       ellipse_on_sphere, latitude_circle, solid_angle_cos,
                       star_cap)
from .postproc import (ManufacturedSolution, TargetSet, eval_dlp,
                       exact_solution_eval, pde_residual_check,
                       representation_check, scatter_targets)
from .quadrature import (QuadratureRule, alpert16_rule, singular_row_weights,
                         trapezoid_rule, trapezoid_integrate, trig_interpolate)
from .specfun import (SeriesPolicy, YukawaDegree, conical_p, conical_p_deriv,
                      digamma_conjugate_sum, fundamental_solution)

__version__ = "0.1.0"
