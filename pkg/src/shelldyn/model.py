"""Scenario description, initial density profiles, and per-layer coefficient functions.

A layer is labeled by its initial radius r.  Everything downstream (maps,
trajectories, densities) is driven by a handful of profile-dependent numbers
collected in :class:`LayerCoefficients`: the enclosed particle count N(r), the
force scale theta^2, its dimensionless forms beta_bar^2 and eta^2, the time
scale lambda(r), and the radial derivatives of all of these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, QuasiRelativismError
from .special import adaptive_quad

# SI values, convenient for scenario files that want physical units.
C_LIGHT_SI = 299792458.0
EPS0_SI = 8.8541878128e-12
G_SI = 6.67430e-11
ELECTRON_CHARGE_SI = 1.602176634e-19
ELECTRON_MASS_SI = 9.1093837015e-31
HBAR_SI = 1.054571817e-34


class Interaction(str, Enum):
    EM = "em"
    GRAVITY = "gravity"


class Symmetry(str, Enum):
    SPHERE = "sphere"
    CYLINDER = "cylinder"


class Regime(str, Enum):
    RELATIVISTIC = "relativistic"
    CLASSICAL = "classical"


@dataclass(frozen=True)
class Scenario:
    """Interaction kind, symmetry, regime, and the physical constants.

    Defaults are the nondimensional choice (everything 1); pass SI constants
    explicitly for dimensional runs.  ``q`` carries the overall charge sign;
    profile densities are stored nonnegative.
    """

    interaction: Interaction
    symmetry: Symmetry
    regime: Regime
    q: float = 1.0
    m: float = 1.0
    c: float = 1.0
    eps0: float = 1.0
    G: float = 1.0
    slab_height_ell: float = 1.0

    def __post_init__(self):
        if self.m <= 0 or self.c <= 0 or self.eps0 <= 0 or self.G <= 0:
            raise DomainError("m, c, eps0, G must all be positive")
        if self.slab_height_ell <= 0:
            raise DomainError("slab_height_ell must be positive")
        if self.interaction is Interaction.EM and self.q == 0.0:
            raise DomainError("electromagnetic scenario requires q != 0")

    @property
    def quantum_unit(self) -> float:
        """Charge (EM) or mass (gravity) of one constituent particle, positive."""
        return abs(self.q) if self.interaction is Interaction.EM else self.m


@dataclass(frozen=True)
class UniformProfile:
    """Constant density rho0 inside r <= r_max, zero outside."""

    rho0: float
    r_max: float

    def __post_init__(self):
        if self.rho0 < 0 or not math.isfinite(self.rho0):
            raise DomainError("rho0 must be nonnegative and finite")
        if self.r_max <= 0:
            raise DomainError("r_max must be positive")


@dataclass(frozen=True)
class LogNormalShellProfile:
    """Shell-like profile whose enclosed count is a log-normal CDF of ln(tau*r).

    ``f0`` is the total particle count, ``tau`` the radial scale factor,
    ``mu_r``/``sigma_r`` the log-mean and log-std.  The density is normalized
    so that N(inf) = f0 for either symmetry.
    """

    f0: float
    tau: float
    mu_r: float = 0.0
    sigma_r: float = 0.2

    def __post_init__(self):
        if self.f0 <= 0:
            raise DomainError("f0 must be positive")
        if self.tau <= 0 or self.sigma_r <= 0:
            raise DomainError("tau and sigma_r must be positive")


@dataclass(frozen=True)
class TabulatedProfile:
    """Density sampled on strictly increasing radii, monotone-cubic interpolated."""

    nodes: Tuple[Tuple[float, float], ...]
    r_max: float

    def __post_init__(self):
        rs = [r for r, _ in self.nodes]
        vals = [v for _, v in self.nodes]
        if len(rs) < 2:
            raise DomainError("tabulated profile needs at least two nodes")
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise DomainError("tabulated radii must be strictly increasing")
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise DomainError("tabulated densities must be nonnegative and finite")
        if rs[0] < 0 or self.r_max <= 0:
            raise DomainError("radii must be nonnegative, r_max positive")

    def interpolator(self) -> PchipInterpolator:
        rs = np.array([r for r, _ in self.nodes])
        vals = np.array([v for _, v in self.nodes])
        return PchipInterpolator(rs, vals, extrapolate=False)


InitialProfile = Union[UniformProfile, LogNormalShellProfile, TabulatedProfile]


@dataclass(frozen=True)
class LayerCoefficients:
    """All per-layer inputs to the characteristic maps and density formulas.

    ``eta_sq``/``d_eta_sq`` are populated for spherical symmetry only.  In the
    classical regime ``lam``/``d_lam`` hold the c-free limit formulas while the
    dimensionless fields keep their physical values for diagnostics.
    """

    r: float
    N: float
    theta_sq: float
    beta_bar_sq: float
    lam: float
    d_beta_bar_sq: float
    d_lam: float
    eta_sq: Optional[float] = None
    d_eta_sq: Optional[float] = None


def _normal_cdf(u):
    return 0.5 * (1.0 + math.erf(u / math.sqrt(2.0)))


def initial_density(profile: InitialProfile, scenario: Scenario, r: float) -> float:
    """rho0(r): charge density for EM, mass density for gravity.

    For cylindrical symmetry this is the cross-section density (volumetric
    density times the elementary slab height).
    """
    if r < 0:
        raise DomainError("radius must be nonnegative")
    if isinstance(profile, UniformProfile):
        return profile.rho0 if r <= profile.r_max else 0.0
    if isinstance(profile, LogNormalShellProfile):
        if r == 0.0:
            return 0.0
        z = (math.log(profile.tau * r) - profile.mu_r) / profile.sigma_r
        gauss = math.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * profile.sigma_r)
        unit = scenario.quantum_unit
        if scenario.symmetry is Symmetry.SPHERE:
            return unit * profile.f0 * gauss / (4.0 * math.pi * r ** 3)
        return unit * profile.f0 * gauss / (2.0 * math.pi * r ** 2)
    if isinstance(profile, TabulatedProfile):
        if r > profile.r_max:
            return 0.0
        rs = profile.nodes[0][0], profile.nodes[-1][0]
        rc = min(max(r, rs[0]), rs[1])
        return float(profile.interpolator()(rc))
    raise DomainError(f"unknown profile type {type(profile)!r}")


def cumulative_number(profile: InitialProfile, scenario: Scenario, r: float) -> float:
    """Enclosed particle count N(r); m*N is the enclosed mass, q*N the charge.

    Closed forms for the uniform and log-normal shell profiles; adaptive
    quadrature of the interpolant for tabulated profiles.
    """
    if r < 0:
        raise DomainError("radius must be nonnegative")
    if r == 0.0:
        return 0.0
    unit = scenario.quantum_unit
    sphere = scenario.symmetry is Symmetry.SPHERE
    if isinstance(profile, UniformProfile):
        rc = min(r, profile.r_max)
        if sphere:
            return 4.0 * math.pi / 3.0 * profile.rho0 * rc ** 3 / unit
        return math.pi * profile.rho0 * rc ** 2 / unit
    if isinstance(profile, LogNormalShellProfile):
        z = (math.log(profile.tau * r) - profile.mu_r) / profile.sigma_r
        return profile.f0 * _normal_cdf(z)
    if isinstance(profile, TabulatedProfile):
        rc = min(r, profile.r_max)
        k = 2 if sphere else 1
        geom = 4.0 * math.pi if sphere else 2.0 * math.pi

        def integrand(x):
            return np.array([initial_density(profile, scenario, xi) * xi ** k for xi in np.atleast_1d(x)])

        return geom * adaptive_quad(integrand, 0.0, rc, tol=1e-12) / unit
    raise DomainError(f"unknown profile type {type(profile)!r}")


def support_radii(profile: InitialProfile) -> Tuple[float, float]:
    """Radial range that carries essentially all of the profile's charge/mass."""
    if isinstance(profile, UniformProfile):
        return 0.01 * profile.r_max, profile.r_max
    if isinstance(profile, LogNormalShellProfile):
        lo = math.exp(profile.mu_r - 4.0 * profile.sigma_r) / profile.tau
        hi = math.exp(profile.mu_r + 4.0 * profile.sigma_r) / profile.tau
        return lo, hi
    lo = max(profile.nodes[0][0], 0.01 * profile.r_max)
    return lo, profile.r_max


def reference_radius(profile: InitialProfile) -> float:
    """Outer support scale, used to nondimensionalize shock thresholds."""
    return support_radii(profile)[1]


def default_layer_grid(profile: InitialProfile, n: int = 64) -> np.ndarray:
    """Geometrically spaced layer radii across the profile support."""
    if n < 2:
        raise DomainError("need at least two layers")
    lo, hi = support_radii(profile)
    return np.geomspace(lo, hi, n)


def layer_coefficients(profile: InitialProfile, scenario: Scenario, r: float) -> LayerCoefficients:
    """Evaluate every coefficient the maps need for the layer starting at radius r."""
    if r <= 0:
        raise DomainError("layer radius must be positive")
    n_enc = cumulative_number(profile, scenario, r)
    rho = initial_density(profile, scenario, r)
    q, m, c, eps0, grav = abs(scenario.q), scenario.m, scenario.c, scenario.eps0, scenario.G
    ell = scenario.slab_height_ell
    em = scenario.interaction is Interaction.EM
    sphere = scenario.symmetry is Symmetry.SPHERE
    relativistic = scenario.regime is Regime.RELATIVISTIC

    if sphere:
        if em:
            theta_sq = q * q * n_enc / (4.0 * math.pi * eps0 * m)
            d_theta_sq = q * rho * r * r / (eps0 * m)
        else:
            theta_sq = grav * m * n_enc
            d_theta_sq = 4.0 * math.pi * grav * rho * r * r
    else:
        if em:
            theta_sq = q * q * n_enc / (2.0 * math.pi * eps0 * m * ell)
            d_theta_sq = q * rho * r / (eps0 * m * ell)
        else:
            theta_sq = 2.0 * grav * m * n_enc / ell
            d_theta_sq = 4.0 * math.pi * grav * rho * r / ell

    beta_bar_sq = theta_sq / (c * c)
    d_beta_bar_sq = d_theta_sq / (c * c)
    eta_sq = d_eta_sq = None
    if sphere:
        eta_sq = beta_bar_sq / r
        d_eta_sq = (d_beta_bar_sq - eta_sq) / r
        if relativistic and not em and eta_sq >= 1.0:
            raise QuasiRelativismError(
                f"eta^2(r={r}) = {eta_sq:.6g} >= 1; quasi-relativistic collapse invalid"
            )

    if theta_sq == 0.0:
        # Hollow interior: no enclosed source, the layer never moves.
        return LayerCoefficients(r=r, N=n_enc, theta_sq=0.0, beta_bar_sq=0.0,
                                 lam=0.0, d_beta_bar_sq=d_beta_bar_sq, d_lam=0.0,
                                 eta_sq=eta_sq, d_eta_sq=d_eta_sq)

    if sphere:
        if relativistic:
            y = eta_sq
            eta = math.sqrt(y)
            if em:
                lam = c * eta * math.sqrt(2.0 + y) / (r * (1.0 + y))
                dlam_dy = c / (r * math.sqrt(y * (2.0 + y)) * (1.0 + y) ** 2)
            else:
                lam = c * eta * math.sqrt(2.0 - y) / (r * (1.0 - y))
                dlam_dy = c / (r * math.sqrt(y * (2.0 - y)) * (1.0 - y) ** 2)
            d_lam = dlam_dy * d_eta_sq - lam / r
        else:
            lam = math.sqrt(2.0 * theta_sq / r ** 3)
            if em:
                source = q * rho / (m * eps0)
            else:
                source = 4.0 * math.pi * grav * rho
            d_lam = (source / lam - 1.5 * lam) / r
    else:
        # Cylinder time scale is regime-independent.
        lam = math.sqrt(theta_sq / (2.0 * r * r))
        enclosed = scenario.quantum_unit * n_enc
        d_lam = lam / r * (math.pi * r * r * rho / enclosed - 1.0)

    return LayerCoefficients(r=r, N=n_enc, theta_sq=theta_sq, beta_bar_sq=beta_bar_sq,
                             lam=lam, d_beta_bar_sq=d_beta_bar_sq, d_lam=d_lam,
                             eta_sq=eta_sq, d_eta_sq=d_eta_sq)
