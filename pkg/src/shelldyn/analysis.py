"""Post-processing of density fields: quantum potential and velocity-field stiffness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .density import DensitySnapshot
from .errors import DomainError, NotApplicableError
from .kernels import KernelKind, inverse_map
from .model import (InitialProfile, Interaction, Regime, Scenario, Symmetry,
                    UniformProfile, layer_coefficients)


@dataclass(frozen=True)
class PotentialProfile:
    t: float
    radii: np.ndarray
    values: np.ndarray
    hbar: float
    low_confidence: np.ndarray   # True on the one-sided boundary stencils


def _derivatives_nonuniform(x, g):
    """First and second derivatives on a nonuniform grid, second order.

    Interior points use the three-point Lagrange stencil; the two points at
    each end reuse the one-sided quadratic through their nearest three nodes.
    """
    n = x.size
    d1 = np.empty(n)
    d2 = np.empty(n)
    for i in range(n):
        j = min(max(i, 1), n - 2)
        x0, x1, x2 = x[j - 1], x[j], x[j + 1]
        g0, g1, g2 = g[j - 1], g[j], g[j + 1]
        # Quadratic through the three nodes, differentiated at x[i].
        xi = x[i]
        d1[i] = (g0 * (2 * xi - x1 - x2) / ((x0 - x1) * (x0 - x2))
                 + g1 * (2 * xi - x0 - x2) / ((x1 - x0) * (x1 - x2))
                 + g2 * (2 * xi - x0 - x1) / ((x2 - x0) * (x2 - x1)))
        d2[i] = 2.0 * (g0 / ((x0 - x1) * (x0 - x2))
                       + g1 / ((x1 - x0) * (x1 - x2))
                       + g2 / ((x2 - x0) * (x2 - x1)))
    return d1, d2


def quantum_potential(snap: DensitySnapshot, mass: float, hbar: float) -> PotentialProfile:
    """Q(R) = (hbar^2 / 2m) * Lap(sqrt(rho/m)) / sqrt(rho/m) on the snapshot grid.

    The radial Laplacian is g'' + (k/R) g' with k = 2 (sphere) or 1 (cylinder).
    Requires at least five pre-shock points with positive density.
    """
    if mass <= 0 or hbar < 0:
        raise DomainError("mass must be positive and hbar nonnegative")
    pts = [p for p in snap.points if p.jac > 0.0 and math.isfinite(p.rho)]
    if len(pts) < 5:
        raise DomainError("need at least five pre-shock snapshot points")
    R = np.array([p.R for p in pts])
    rho = np.array([p.rho for p in pts])
    if np.any(rho <= 0.0):
        raise DomainError("quantum potential needs strictly positive density")
    g = np.sqrt(rho / mass)
    d1, d2 = _derivatives_nonuniform(R, g)
    k = 2.0 if snap.symmetry is Symmetry.SPHERE else 1.0
    lap = d2 + k * d1 / R
    q = (hbar * hbar / (2.0 * mass)) * lap / g
    low = np.zeros(R.size, dtype=bool)
    low[:2] = True
    low[-2:] = True
    return PotentialProfile(t=snap.t, radii=R, values=q, hbar=hbar, low_confidence=low)


def effective_velocity_coefficient(profile: InitialProfile, scenario: Scenario,
                                   t: float, dt_fraction: float = 1e-6) -> Tuple[float, float]:
    """Velocity-field coefficient b(t) with <v>(r, t) = +/- r b(t), and its stiffness.

    Defined for the uniform classical sphere, where the field is exactly
    linear in radius: b = lambda sqrt(P - 1) P^(-3/2) (expanding) or
    lambda sqrt(1 - P) P^(-3/2) (contracting).  The stiffness db/dt + b^2
    entering the quadratic effective potential uses a centered finite
    difference for db/dt.
    """
    if not isinstance(profile, UniformProfile):
        raise NotApplicableError("velocity coefficient requires a uniform profile")
    if scenario.regime is not Regime.CLASSICAL or scenario.symmetry is not Symmetry.SPHERE:
        raise NotApplicableError("velocity coefficient defined for the classical sphere")
    if t < 0:
        raise DomainError("time must be nonnegative")
    coeffs = layer_coefficients(profile, scenario, 0.5 * profile.r_max)
    lam = coeffs.lam
    kind = KernelKind(scenario.interaction, scenario.symmetry, scenario.regime)
    expanding = scenario.interaction is Interaction.EM

    def b_of(tt):
        if tt <= 0.0:
            return 0.0
        p = inverse_map(kind, lam * tt)
        off = p - 1.0 if expanding else 1.0 - p
        return lam * math.sqrt(max(off, 0.0)) * p ** -1.5

    b = b_of(t)
    dt = dt_fraction * max(t, 1.0 / lam)
    if t - dt < 0.0:
        bdot = (b_of(t + dt) - b_of(max(t - dt, 0.0))) / (dt + min(t, dt))
    else:
        bdot = (b_of(t + dt) - b_of(t - dt)) / (2.0 * dt)
    return b, bdot + b * b
