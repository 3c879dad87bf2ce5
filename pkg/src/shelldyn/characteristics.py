"""Lagrangian layer trajectories, speeds, shock detection, and collapse times.

A layer that starts at radius r0 with zero initial speed follows
R(t, r0) = r0 * P(lambda(r0) * t, y(r0)) where P is the inverse characteristic
map.  The radial Jacobian dR/dr0 of the layer family signals a caustic (shock)
when it crosses zero; contracting families may instead reach the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import DomainError, NotApplicableError, PastCollapseError
from .kernels import (KernelKind, collapse_endpoint, d_forward_dx, d_forward_dy,
                      inverse_map, kernel_kind)
from .model import (InitialProfile, Interaction, LayerCoefficients, Regime, Scenario,
                    Symmetry, UniformProfile, default_layer_grid, layer_coefficients,
                    reference_radius)

CENTRAL_RADIUS_FRACTION = 1e-6   # R_c below this times R_ref counts as central collapse
SIMULTANEITY_SPREAD = 1e-8       # relative arrival-time spread for "simultaneous"


class LayerSpeed(NamedTuple):
    speed: float      # |v|
    velocity: float   # signed: + outward (EM), - inward (gravity)
    beta: float       # signed v/c from the algebraic first-integral form


@dataclass
class LayerTrajectory:
    r0: float
    samples: List[Tuple[float, float, float]]   # (t, R, beta)
    asymptote: Optional[float] = None           # limiting speed, inf if unbounded


@dataclass
class ShockReport:
    """Outcome of a caustic scan: 'none', 'caustic', or 'central_collapse'."""

    kind: str
    t_c: Optional[float] = None
    R_c: Optional[float] = None
    r_star: Optional[float] = None
    t_first: Optional[float] = None
    simultaneous: Optional[bool] = None
    scan: List[Tuple[float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class CollapseTimes:
    T_scenario: float
    T_sphere: float
    T_cylinder: float
    ratio: float


def layer_args(coeffs: LayerCoefficients, kind: KernelKind) -> Tuple[float, float]:
    """Kernel parameter y and its radial derivative for this symmetry."""
    if kind.sphere:
        return coeffs.eta_sq, coeffs.d_eta_sq
    return coeffs.beta_bar_sq, coeffs.d_beta_bar_sq


def _speed_of_light(coeffs: LayerCoefficients) -> float:
    if coeffs.beta_bar_sq > 0.0:
        return math.sqrt(coeffs.theta_sq / coeffs.beta_bar_sq)
    return 1.0  # immaterial: the layer never moves


def layer_ratio(coeffs: LayerCoefficients, kind: KernelKind, t: float) -> float:
    """Radius ratio x = R/r0 at time t >= 0."""
    if t < 0:
        raise DomainError("time must be nonnegative")
    if t == 0.0 or coeffs.lam == 0.0:
        return 1.0
    y, _ = layer_args(coeffs, kind)
    try:
        return inverse_map(kind, coeffs.lam * t, y)
    except PastCollapseError as exc:
        raise PastCollapseError(
            f"layer r0={coeffs.r} collapses at t={exc.f_endpoint / coeffs.lam:.6g} < {t:.6g}",
            f_endpoint=exc.f_endpoint,
            t_arrival=exc.f_endpoint / coeffs.lam,
        ) from None


def layer_radius(coeffs: LayerCoefficients, kind: KernelKind, t: float) -> float:
    """Layer radius R(t, r0) = r0 * P(lambda t, y)."""
    return coeffs.r * layer_ratio(coeffs, kind, t)


def arrival_time(coeffs: LayerCoefficients, kind: KernelKind) -> float:
    """Center-arrival time of a contracting layer: F(0, y) / lambda."""
    if kind.expanding:
        raise NotApplicableError("expanding layers never reach the center")
    if coeffs.lam == 0.0:
        return math.inf
    y, _ = layer_args(coeffs, kind)
    return collapse_endpoint(kind, y) / coeffs.lam


def _kappa(kind: KernelKind, x: float) -> float:
    if kind.sphere:
        return (x - 1.0) / x if kind.expanding else (1.0 - x) / x
    return math.log(x) if kind.expanding else -math.log(x)


def beta_from_ratio(coeffs: LayerCoefficients, kind: KernelKind, x: float) -> float:
    """Signed v/c at radius ratio x, from the algebraic first-integral form."""
    if coeffs.lam == 0.0 or x == 1.0:
        return 0.0
    y, _ = layer_args(coeffs, kind)
    sign = 1.0 if kind.expanding else -1.0
    kap = _kappa(kind, x)
    if kind.relativistic:
        gm1 = y * kap
        beta = math.sqrt(gm1 * (gm1 + 2.0)) / (1.0 + gm1)
        return sign * beta
    factor = 1.0 if kind.sphere else 2.0
    c = _speed_of_light(coeffs)
    return sign * factor * coeffs.r * coeffs.lam * math.sqrt(kap) / c


def layer_speed(coeffs: LayerCoefficients, kind: KernelKind, t: float) -> LayerSpeed:
    """Speed magnitude, signed velocity, and the algebraic beta cross-check.

    The kinematic route r0*lambda/|dF/dx| passes through the map derivative;
    t = 0 is defined as exactly zero speed (the derivative is singular there).
    """
    if t < 0:
        raise DomainError("time must be nonnegative")
    if t == 0.0 or coeffs.lam == 0.0:
        return LayerSpeed(0.0, 0.0, 0.0)
    x = layer_ratio(coeffs, kind, t)
    if x == 1.0:
        return LayerSpeed(0.0, 0.0, 0.0)
    y, _ = layer_args(coeffs, kind)
    sign = 1.0 if kind.expanding else -1.0
    v = coeffs.r * coeffs.lam / abs(d_forward_dx(kind, x, y))
    return LayerSpeed(v, sign * v, beta_from_ratio(coeffs, kind, x))


def speed_asymptote(coeffs: LayerCoefficients, kind: KernelKind) -> float:
    """Limiting speed of an expanding layer; ``inf`` marks the unbounded case."""
    if not kind.expanding:
        raise NotApplicableError("contracting layers have no speed asymptote")
    c = _speed_of_light(coeffs)
    if kind.sphere:
        if kind.relativistic:
            y = coeffs.eta_sq
            return c * math.sqrt(y * (2.0 + y)) / (1.0 + y)
        return coeffs.r * coeffs.lam
    if kind.relativistic:
        return c
    return math.inf


def eta_from_beta_inf(beta_inf: float) -> Tuple[float, float]:
    """Invert the limiting-speed law: eta^2 = gamma(v_inf) - 1, and the packing ratio.

    The packing estimate n (initial radius over the constituent classical
    radius) satisfies the same speed law with n in place of eta, so n = eta.
    """
    if not 0.0 <= beta_inf < 1.0:
        raise DomainError(f"limiting speed ratio must be in [0, 1), got {beta_inf}")
    b2 = beta_inf * beta_inf
    root = math.sqrt(1.0 - b2)
    eta_sq = b2 / (root * (1.0 + root))
    return eta_sq, math.sqrt(eta_sq)


def trajectory(profile: InitialProfile, scenario: Scenario, r0: float,
               times) -> LayerTrajectory:
    """Sampled layer trajectory with the speed asymptote attached when defined."""
    kind = kernel_kind(scenario)
    coeffs = layer_coefficients(profile, scenario, r0)
    samples = []
    for t in times:
        x = layer_ratio(coeffs, kind, float(t))
        samples.append((float(t), coeffs.r * x, beta_from_ratio(coeffs, kind, x)))
    asym = speed_asymptote(coeffs, kind) if kind.expanding else None
    return LayerTrajectory(r0=r0, samples=samples, asymptote=asym)


def ratio_and_jacobian(coeffs: LayerCoefficients, kind: KernelKind,
                       t: float) -> Tuple[float, float]:
    """Radius ratio x and radial Jacobian dR/dr0 = x + r*(lam' t - y' dF/dy)/dF/dx."""
    if t < 0:
        raise DomainError("time must be nonnegative")
    if t == 0.0 or coeffs.lam == 0.0:
        return 1.0, 1.0
    x = layer_ratio(coeffs, kind, t)
    if x == 1.0:
        return 1.0, 1.0
    y, dy = layer_args(coeffs, kind)
    dfdx = d_forward_dx(kind, x, y)
    dfdy = d_forward_dy(kind, x, y) if kind.relativistic else 0.0
    jac = x + coeffs.r * (coeffs.d_lam * t - dy * dfdy) / dfdx
    return x, jac


def radial_jacobian(coeffs: LayerCoefficients, kind: KernelKind, t: float) -> float:
    return ratio_and_jacobian(coeffs, kind, t)[1]


def _first_jacobian_zero(coeffs: LayerCoefficients, kind: KernelKind,
                         t_hi: float, n_steps: int) -> Optional[float]:
    """Earliest time in (0, t_hi] where the Jacobian crosses zero, or None."""
    if t_hi <= 0.0 or coeffs.lam == 0.0:
        return None
    t_prev = 0.0
    for i in range(1, n_steps + 1):
        t = t_hi * i / n_steps
        _, jac = ratio_and_jacobian(coeffs, kind, t)
        if jac <= 0.0:
            lo, hi = t_prev, t
            while hi - lo > 1e-12 * hi:
                mid = 0.5 * (lo + hi)
                if ratio_and_jacobian(coeffs, kind, mid)[1] <= 0.0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
        t_prev = t
    return None


def _golden_minimize(f, a, b, rel_tol, max_iter=80):
    invphi = 0.5 * (math.sqrt(5.0) - 1.0)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= rel_tol * b:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def shock_time(profile: InitialProfile, scenario: Scenario, r_grid=None,
               t_max: float = None, n_time_steps: int = 400,
               refine: bool = True) -> ShockReport:
    """Locate the earliest caustic (Jacobian zero) or classify the collapse.

    Marches each layer's Jacobian on a uniform time grid to bracket the first
    sign change, bisects it to 1e-12 relative, takes the minimum over layers,
    and (optionally) refines the minimizing radius by golden-section search.
    """
    if t_max is None or t_max <= 0.0:
        raise DomainError("t_max must be positive")
    kind = kernel_kind(scenario)
    if r_grid is None:
        r_grid = default_layer_grid(profile)
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size == 0:
        raise DomainError("empty layer grid")
    gravity = not kind.expanding

    def horizon(coeffs):
        if not gravity:
            return t_max, math.inf
        t_arr = arrival_time(coeffs, kind)
        return min(t_max, t_arr * (1.0 - 1e-9)), t_arr

    def crossing_for(r):
        coeffs = layer_coefficients(profile, scenario, float(r))
        t_hi, t_arr = horizon(coeffs)
        t0 = _first_jacobian_zero(coeffs, kind, t_hi, n_time_steps)
        return coeffs, t0, t_arr

    scan = []
    crossings = []
    arrivals = []
    moving_layers = 0
    for r in r_grid:
        coeffs, t0, t_arr = crossing_for(r)
        if coeffs.lam > 0.0:
            moving_layers += 1
            if gravity:
                arrivals.append(t_arr)
        scan.append((float(r), t0 if t0 is not None else math.nan))
        if t0 is not None:
            crossings.append((t0, float(r)))

    report = ShockReport(kind="none", scan=scan)
    r_ref = reference_radius(profile)

    if crossings:
        t_best, r_best = min(crossings)
        if refine and r_grid.size > 2:
            idx = int(np.argmin([math.inf if math.isnan(t) else t for _, t in scan]))
            lo = r_grid[max(idx - 1, 0)]
            hi = r_grid[min(idx + 1, r_grid.size - 1)]

            def objective(r):
                _, t0, _ = crossing_for(r)
                return t0 if t0 is not None else math.inf

            r_ref_min, t_ref_min = _golden_minimize(objective, float(lo), float(hi), 1e-5)
            if t_ref_min < t_best:
                t_best, r_best = t_ref_min, r_ref_min
        coeffs = layer_coefficients(profile, scenario, r_best)
        x_c = layer_ratio(coeffs, kind, t_best)
        R_c = r_best * x_c
        simultaneous = None
        if gravity and arrivals:
            spread = (max(arrivals) - min(arrivals)) / min(arrivals)
            simultaneous = spread < SIMULTANEITY_SPREAD
        if R_c < CENTRAL_RADIUS_FRACTION * r_ref:
            report = ShockReport(kind="central_collapse", t_first=t_best,
                                 simultaneous=bool(simultaneous), scan=scan)
        else:
            report = ShockReport(kind="caustic", t_c=t_best, R_c=R_c, r_star=r_best,
                                 scan=scan)
        return report

    if gravity and arrivals and len(arrivals) == moving_layers:
        if max(arrivals) <= t_max:
            spread = (max(arrivals) - min(arrivals)) / min(arrivals)
            report = ShockReport(kind="central_collapse", t_first=min(arrivals),
                                 simultaneous=spread < SIMULTANEITY_SPREAD, scan=scan)
    return report


def collapse_times(profile: InitialProfile, scenario: Scenario) -> CollapseTimes:
    """Closed-form uniform classical collapse times for both symmetries.

    The cylindrical profile density is a cross-section density; the matching
    volumetric density divides out the slab height.
    """
    if scenario.interaction is not Interaction.GRAVITY:
        raise NotApplicableError("collapse times are defined for gravity only")
    if scenario.regime is not Regime.CLASSICAL:
        raise NotApplicableError("collapse times use the classical closed forms")
    if not isinstance(profile, UniformProfile):
        raise NotApplicableError("collapse times require a uniform profile")
    rho_vol = profile.rho0
    if scenario.symmetry is Symmetry.CYLINDER:
        rho_vol = profile.rho0 / scenario.slab_height_ell
    if rho_vol <= 0:
        raise DomainError("collapse requires positive density")
    g_rho = scenario.G * rho_vol
    t_sphere = 0.25 * math.sqrt(3.0 * math.pi / (2.0 * g_rho))
    t_cyl = 0.5 / math.sqrt(g_rho)
    t_scen = t_sphere if scenario.symmetry is Symmetry.SPHERE else t_cyl
    return CollapseTimes(T_scenario=t_scen, T_sphere=t_sphere, T_cylinder=t_cyl,
                         ratio=t_sphere / t_cyl)
