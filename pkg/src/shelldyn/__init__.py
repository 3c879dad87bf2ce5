"""Exact characteristic-map dynamics of self-consistent charged and gravitating layers."""

from .analysis import PotentialProfile, effective_velocity_coefficient, quantum_potential
from .characteristics import (CollapseTimes, LayerSpeed, LayerTrajectory, ShockReport,
                              arrival_time, beta_from_ratio, collapse_times,
                              eta_from_beta_inf, layer_radius, layer_ratio, layer_speed,
                              radial_jacobian, ratio_and_jacobian, shock_time,
                              speed_asymptote, trajectory)
from .density import (DensitySnapshot, SnapshotPoint, conservation_check, density_at,
                      snapshot)
from .errors import (DomainError, NotApplicableError, NumericDomainError,
                     PastCollapseError, PastShockError, QuasiRelativismError,
                     ShellDynError, SingularityError, ToleranceNotMetError)
from .kernels import (KernelKind, adaptive_quad, arccosh, collapse_endpoint,
                      d_forward_dx, d_forward_dy, erf, erfinv, forward_map,
                      inverse_map, kernel_kind)
from .model import (InitialProfile, Interaction, LayerCoefficients,
                    LogNormalShellProfile, Regime, Scenario, Symmetry,
                    TabulatedProfile, UniformProfile, cumulative_number,
                    default_layer_grid, initial_density, layer_coefficients,
                    reference_radius, support_radii)
from .oracle import OdeResult, first_integral_speed, integrate_layer_ode, time_of_flight

__version__ = "0.1.0"
