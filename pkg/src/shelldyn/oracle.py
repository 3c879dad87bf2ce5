"""Independent verification path: direct integration of the equations of motion.

Never used by the map-based solution; shares only the layer coefficients.
Three routes cross-check each other and the closed forms:

* adaptive Dormand-Prince 5(4) integration of
  R'' = +/- (theta^2 / R^k) * (1 - R'^2/c^2)^(3/2)   (k=2 sphere, k=1 cylinder),
* time-of-flight quadrature of dt = dR / |v(R)| using the energy first
  integral, with the square-root singularity at R0 removed by R = R0(1 +/- u^2),
* the algebraic speed v(R) from the first integral itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import quad as _scipy_quad

from .errors import DomainError
from .kernels import KernelKind
from .model import LayerCoefficients

R_FLOOR_FRACTION = 1e-8   # gravitational integration stops at this fraction of R0

# Dormand-Prince 5(4) tableau.
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


@dataclass
class OdeResult:
    samples: List[Tuple[float, float, float]]   # accepted (t, R, Rdot)
    max_rel_err_vs_closed_form: float
    steps_taken: int
    rejections: int
    event: Optional[str] = None                 # "floor" if R reached the floor
    t_event: Optional[float] = None


def _light_speed(coeffs: LayerCoefficients) -> float:
    if coeffs.beta_bar_sq > 0.0:
        return math.sqrt(coeffs.theta_sq / coeffs.beta_bar_sq)
    return 1.0


def _accel(coeffs: LayerCoefficients, kind: KernelKind, c: float, R: float, V: float):
    """Right-hand side acceleration; None when the trial state left |V| < c."""
    k = 2 if kind.sphere else 1
    a = coeffs.theta_sq / R ** k
    if not kind.expanding:
        a = -a
    if kind.relativistic:
        g = 1.0 - (V / c) ** 2
        if g <= 0.0:
            return None
        a *= g * math.sqrt(g)
    return a


def integrate_layer_ode(coeffs: LayerCoefficients, kind: KernelKind, t_end: float,
                        tol: float = 1e-10,
                        reference: Optional[Callable[[float], float]] = None,
                        r_floor_fraction: float = R_FLOOR_FRACTION) -> OdeResult:
    """Integrate the layer's equation of motion from rest out to t_end.

    ``reference``, when given, is an independent R(t) used to fill
    ``max_rel_err_vs_closed_form`` (normalized by R0) at every accepted step.
    Contracting layers stop with event "floor" when R falls to
    ``r_floor_fraction * R0``.
    """
    if t_end <= 0.0:
        raise DomainError("t_end must be positive")
    r0 = coeffs.r
    c = _light_speed(coeffs)
    floor = r_floor_fraction * r0
    t, R, V = 0.0, r0, 0.0
    samples = [(t, R, V)]
    steps = rejections = 0
    max_err = 0.0
    if coeffs.lam > 0.0:
        h = min(t_end, 1e-2 / coeffs.lam)
    else:
        h = t_end
    sc_r = tol * r0
    sc_v = tol * max(c if kind.relativistic else r0 * max(coeffs.lam, 1e-300), 1e-300)
    event = None
    t_event = None

    def rhs(Ri, Vi):
        if Ri <= 0.0:
            return None
        a = _accel(coeffs, kind, c, Ri, Vi)
        if a is None:
            return None
        return Vi, a

    while t < t_end and event is None:
        h = min(h, t_end - t)
        kR = [0.0] * 7
        kV = [0.0] * 7
        bad = False
        for i in range(7):
            Ri = R + h * sum(aij * kR[j] for j, aij in enumerate(_DP_A[i]))
            Vi = V + h * sum(aij * kV[j] for j, aij in enumerate(_DP_A[i]))
            deriv = rhs(Ri, Vi)
            if deriv is None:
                bad = True
                break
            kR[i], kV[i] = deriv
        if not bad:
            R5 = R + h * sum(b * k for b, k in zip(_DP_B5, kR))
            V5 = V + h * sum(b * k for b, k in zip(_DP_B5, kV))
            R4 = R + h * sum(b * k for b, k in zip(_DP_B4, kR))
            V4 = V + h * sum(b * k for b, k in zip(_DP_B4, kV))
            err = math.sqrt(0.5 * (((R5 - R4) / (sc_r + tol * abs(R5))) ** 2
                                   + ((V5 - V4) / (sc_v + tol * abs(V5))) ** 2))
            ok = err <= 1.0 and (not kind.relativistic or abs(V5) < c) and R5 > 0.0
        else:
            ok = False
            err = math.inf
        if not ok:
            rejections += 1
            h *= 0.5 if bad else max(0.2, 0.9 * err ** -0.2)
            if h < 1e-16 * max(t, 1.0):
                raise DomainError("step size underflow in layer integration")
            continue
        if not kind.expanding and R5 <= floor:
            # Bisect the step until the floor is hit to sub-tolerance.
            lo_h, hi_h = 0.0, h
            for _ in range(80):
                mid = 0.5 * (lo_h + hi_h)
                Rm = R + mid * sum(b * k for b, k in zip(_DP_B5, kR))
                if Rm <= floor:
                    hi_h = mid
                else:
                    lo_h = mid
            h_hit = hi_h
            R5 = R + h_hit * sum(b * k for b, k in zip(_DP_B5, kR))
            V5 = V + h_hit * sum(b * k for b, k in zip(_DP_B5, kV))
            t += h_hit
            event, t_event = "floor", t
        else:
            t += h
        R, V = R5, V5
        steps += 1
        samples.append((t, R, V))
        if reference is not None:
            max_err = max(max_err, abs(R - reference(t)) / r0)
        if err > 0.0:
            h *= min(5.0, 0.9 * err ** -0.2)
    return OdeResult(samples=samples, max_rel_err_vs_closed_form=max_err if reference else math.nan,
                     steps_taken=steps, rejections=rejections, event=event, t_event=t_event)


def _gamma_minus_one(coeffs: LayerCoefficients, kind: KernelKind, R: float) -> float:
    """gamma(R) - 1 from the energy first integral, exact at R = R0."""
    r0 = coeffs.r
    bb = coeffs.beta_bar_sq
    if kind.sphere:
        val = bb * (1.0 / r0 - 1.0 / R) if kind.expanding else bb * (1.0 / R - 1.0 / r0)
    else:
        val = bb * math.log(R / r0) if kind.expanding else bb * math.log(r0 / R)
    return val


def first_integral_speed(coeffs: LayerCoefficients, kind: KernelKind, R: float) -> float:
    """Signed layer velocity at radius R from the energy first integral."""
    if R <= 0.0:
        raise DomainError("radius must be positive")
    sign = 1.0 if kind.expanding else -1.0
    if coeffs.theta_sq == 0.0:
        return 0.0
    if kind.relativistic:
        gm1 = _gamma_minus_one(coeffs, kind, R)
        if gm1 < 0.0:
            if gm1 > -1e-14:
                gm1 = 0.0
            else:
                raise DomainError(f"radius {R} unreachable from rest at {coeffs.r}")
        c = _light_speed(coeffs)
        gamma = 1.0 + gm1
        return sign * c * math.sqrt(gm1 * (gm1 + 2.0)) / gamma
    r0 = coeffs.r
    if kind.sphere:
        kap = (1.0 / r0 - 1.0 / R) if kind.expanding else (1.0 / R - 1.0 / r0)
    else:
        kap = math.log(R / r0) if kind.expanding else math.log(r0 / R)
    if kap < 0.0:
        if kap > -1e-14:
            kap = 0.0
        else:
            raise DomainError(f"radius {R} unreachable from rest at {coeffs.r}")
    return sign * math.sqrt(2.0 * coeffs.theta_sq * kap)


def time_of_flight(coeffs: LayerCoefficients, kind: KernelKind, R_target: float) -> float:
    """t(R_target) = integral of dR/|v| along the motion, by adaptive quadrature.

    Substituting R = R0 (1 +/- u^2) removes the 1/sqrt singularity at the
    start radius, leaving a smooth integrand for QUADPACK.
    """
    r0 = coeffs.r
    if R_target <= 0.0 and not (not kind.expanding and R_target == 0.0):
        raise DomainError("target radius must be positive")
    if kind.expanding and R_target < r0 * (1.0 - 1e-12):
        raise DomainError("expanding layer cannot reach a smaller radius")
    if not kind.expanding and R_target > r0 * (1.0 + 1e-12):
        raise DomainError("contracting layer cannot reach a larger radius")
    if coeffs.theta_sq == 0.0:
        raise DomainError("motionless layer (no enclosed source)")
    x_t = R_target / r0
    u_max = math.sqrt(abs(x_t - 1.0))
    if u_max == 0.0:
        return 0.0
    sgn = 1.0 if kind.expanding else -1.0
    c = _light_speed(coeffs)

    def speed_mag(u):
        # kappa evaluated directly in u to avoid 1/r0 - 1/R cancellation.
        u2 = u * u
        R = r0 * (1.0 + sgn * u2)
        if kind.sphere:
            kap = u2 / R     # |1/r0 - 1/R| without subtractive cancellation
        else:
            kap = math.log1p(u2) if kind.expanding else -math.log1p(-u2)
        if kind.relativistic:
            gm1 = coeffs.beta_bar_sq * kap
            return c * math.sqrt(gm1 * (gm1 + 2.0)) / (1.0 + gm1)
        return math.sqrt(2.0 * coeffs.theta_sq * kap)

    def integrand(u):
        return 2.0 * r0 * u / speed_mag(u)

    val, _ = _scipy_quad(integrand, 0.0, u_max, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val
