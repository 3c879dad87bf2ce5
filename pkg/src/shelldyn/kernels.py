"""The eight characteristic maps F(x, y), their partials, and the inverse P = F^-1.

``x = R/R0`` is the radius ratio of a layer, ``y`` its parameter (eta^2 for
spheres, beta_bar^2 for cylinders; ignored by classical variants).  The map
value equals the scaled time, F(x, y) = lambda(R0) * t.  Electromagnetic
variants expand on x >= 1 with F increasing; gravitational variants contract
on 0 <= x <= 1 with F increasing along the motion (decreasing in x), reaching
the finite collapse endpoint F(0, y).

Sphere variants are closed forms (square root plus arccosh/arccos term),
evaluated through the factored quadratic so nothing cancels near x = 1, with a
two-term series in sqrt(|x - 1|) below ``SERIES_SWITCH``.  Cylinder variants
integrate their defining integrands with adaptive Gauss-Kronrod quadrature;
the classical cylinder limits collapse to erfi/erf closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfi as _erfi

from .errors import DomainError, NumericDomainError, PastCollapseError, SingularityError
from .model import Interaction, Regime, Scenario, Symmetry
from .special import adaptive_quad, arccosh, arccosh1p, erf, erfinv, solve_monotone

__all__ = [
    "KernelKind", "kernel_kind", "forward_map", "d_forward_dx", "d_forward_dy",
    "inverse_map", "collapse_endpoint", "erf", "erfinv", "arccosh", "adaptive_quad",
]

CLAMP_TOL = 1e-12      # forgive domain violations up to this much rounding
SERIES_SWITCH = 1e-8   # |x - 1| below this: series in u = sqrt(|x - 1|)
QUAD_TOL = 1e-11       # default tolerance for the cylinder map integrals
LN_CUTOFF = 8.5        # z-integral truncation; exp(-z^2) < 1e-31 beyond


@dataclass(frozen=True)
class KernelKind:
    """One of the eight map variants."""

    interaction: Interaction
    symmetry: Symmetry
    regime: Regime

    @property
    def expanding(self) -> bool:
        return self.interaction is Interaction.EM

    @property
    def relativistic(self) -> bool:
        return self.regime is Regime.RELATIVISTIC

    @property
    def sphere(self) -> bool:
        return self.symmetry is Symmetry.SPHERE

    def __str__(self):
        return f"{self.interaction.value}-{self.symmetry.value}-{self.regime.value}"


def kernel_kind(scenario: Scenario) -> KernelKind:
    return KernelKind(scenario.interaction, scenario.symmetry, scenario.regime)


def _check_y(kind: KernelKind, y: float):
    if y < 0.0:
        raise DomainError(f"layer parameter y must be nonnegative, got {y}")
    if (kind.relativistic and kind.sphere and not kind.expanding and y >= 1.0):
        raise DomainError(f"gravitational sphere map requires y < 1, got {y}")


def _offset(kind: KernelKind, x: float) -> float:
    """Signed offset from 1 within the kind's domain: w = x-1 (EM), e = 1-x (gravity)."""
    if kind.expanding:
        w = x - 1.0
        if w < 0.0:
            if w > -CLAMP_TOL:
                return 0.0
            raise DomainError(f"expanding map requires x >= 1, got {x}")
        return w
    e = 1.0 - x
    if e < 0.0:
        if e > -CLAMP_TOL:
            return 0.0
        raise DomainError(f"contracting map requires x <= 1, got {x}")
    if e > 1.0:
        if e < 1.0 + CLAMP_TOL:
            return 1.0
        raise DomainError(f"contracting map requires x >= 0, got {x}")
    return e


# -- sphere closed forms, in offset coordinates ------------------------------

def _em_sphere_F(w, y):
    if w < SERIES_SWITCH:
        c1 = math.sqrt(2.0 * (2.0 + y)) / (1.0 + y)
        return c1 * math.sqrt(w) * (1.0 + (2.0 + 3.0 * y) / 12.0 * w)
    a = y / (y + 2.0)
    root = math.sqrt(w * (w + 1.0 - a))
    return root + arccosh1p((y + 2.0) * w) / ((y + 1.0) * (y + 2.0))


def _em_sphere_dFdw(w, y):
    a = y / (y + 2.0)
    num = (2.0 * w + 1.0 - a) / 2.0 + 1.0 / ((y + 1.0) * (y + 2.0))
    return num / math.sqrt(w * (w + 1.0 - a))


def _em_sphere_dFdy(w, y):
    a = y / (y + 2.0)
    t1 = y * math.sqrt(w / (w + 1.0 - a))
    t2 = (2.0 * y + 3.0) / (1.0 + y) * arccosh1p((y + 2.0) * w)
    return -(t1 + t2) / ((2.0 + y) ** 2 * (1.0 + y))


def _g_sphere_F(e, y):
    if e < SERIES_SWITCH:
        c1 = math.sqrt(2.0 * (2.0 - y)) / (1.0 - y)
        return c1 * math.sqrt(e) * (1.0 + (3.0 * y - 2.0) / 12.0 * e)
    ab = y / (2.0 - y)
    root = math.sqrt(e * (1.0 - e + ab))
    half = 0.5 * (2.0 - y) * e
    if half > 1.0:
        if half > 1.0 + CLAMP_TOL:
            raise NumericDomainError(f"arccos argument out of range by {half - 1.0:.3e}")
        half = 1.0
    return root + 2.0 * math.asin(math.sqrt(half)) / ((1.0 - y) * (2.0 - y))


def _g_sphere_dFde(e, y):
    # dF/de = -dF/dx, positive along the collapse.
    ab = y / (2.0 - y)
    num = (1.0 + ab - 2.0 * e) / 2.0 + 1.0 / ((1.0 - y) * (2.0 - y))
    return num / math.sqrt(e * (1.0 - e + ab))


def _g_sphere_dFdy(e, y):
    ab = y / (2.0 - y)
    t1 = -y * math.sqrt(e / (1.0 - e + ab))
    t2 = (3.0 - 2.0 * y) / (1.0 - y) * 2.0 * math.asin(math.sqrt(min(1.0, 0.5 * (2.0 - y) * e)))
    return (t1 + t2) / ((2.0 - y) ** 2 * (1.0 - y))


def _em_sphere_cl_F(w):
    u = math.sqrt(w)
    return u * math.sqrt(1.0 + w) + math.asinh(u)


def _g_sphere_cl_F(e):
    u = math.sqrt(e)
    return u * math.sqrt(1.0 - e) + math.asin(u)


# -- cylinder integrands and maps --------------------------------------------

def _cyl_integrand(y, sign):
    def f(z):
        z = np.asarray(z, dtype=float)
        yz2 = y * z * z
        return math.sqrt(2.0) * (1.0 + yz2) / np.sqrt(2.0 + yz2) * np.exp(sign * z * z)
    return f


def _cyl_dy_integrand(y, sign):
    def f(z):
        z = np.asarray(z, dtype=float)
        yz2 = y * z * z
        return (3.0 + yz2) * z * z / (math.sqrt(2.0) * (2.0 + yz2) ** 1.5) * np.exp(sign * z * z)
    return f


def _cyl_upper_limit(kind: KernelKind, x: float) -> float:
    lx = math.log(x) if x > 0.0 else -math.inf
    L2 = lx if kind.expanding else -lx
    if L2 <= 0.0:
        return 0.0
    return min(math.sqrt(L2), LN_CUTOFF) if not kind.expanding else math.sqrt(L2)


def _cyl_F(kind: KernelKind, x, y, tol):
    L = _cyl_upper_limit(kind, x)
    if L == 0.0:
        return 0.0
    sign = 1.0 if kind.expanding else -1.0
    if kind.relativistic:
        return adaptive_quad(_cyl_integrand(y, sign), 0.0, L, tol=tol)
    if kind.expanding:
        return 0.5 * math.sqrt(math.pi) * float(_erfi(L))
    return 0.5 * math.sqrt(math.pi) * erf(L)


# -- public surface -----------------------------------------------------------

def forward_map(kind: KernelKind, x: float, y: float = 0.0, quad_tol: float = QUAD_TOL) -> float:
    """Map value F(x, y) = lambda * t for radius ratio x.

    Strictly increasing in x for expanding kinds on x >= 1 and strictly
    decreasing for contracting kinds on [0, 1]; F(1, y) = 0 always.
    """
    _check_y(kind, y)
    if kind.sphere:
        off = _offset(kind, x)
        if kind.expanding:
            return _em_sphere_F(off, y) if kind.relativistic else _em_sphere_cl_F(off)
        return _g_sphere_F(off, y) if kind.relativistic else _g_sphere_cl_F(off)
    if kind.expanding:
        if x < 1.0:
            if x < 1.0 - CLAMP_TOL:
                raise DomainError(f"expanding map requires x >= 1, got {x}")
            x = 1.0
    else:
        if x > 1.0:
            if x > 1.0 + CLAMP_TOL:
                raise DomainError(f"contracting map requires x <= 1, got {x}")
            x = 1.0
        if x < 0.0:
            if x < -CLAMP_TOL:
                raise DomainError(f"contracting map requires x >= 0, got {x}")
            x = 0.0
    return _cyl_F(kind, x, y, quad_tol)


def d_forward_dx(kind: KernelKind, x: float, y: float = 0.0) -> float:
    """Exact partial dF/dx; diverges like |x-1|^(-1/2) (sphere) or |ln x|^(-1/2) (cylinder)."""
    _check_y(kind, y)
    if kind.sphere:
        off = _offset(kind, x)
        if off == 0.0:
            raise SingularityError("dF/dx is singular at x = 1")
        if kind.expanding:
            return _em_sphere_dFdw(off, y) if kind.relativistic else math.sqrt((1.0 + off) / off)
        return -(_g_sphere_dFde(off, y)) if kind.relativistic else -math.sqrt((1.0 - off) / off)
    if x <= 0.0 and not kind.expanding:
        raise DomainError("contracting cylinder map derivative needs x > 0")
    lx = math.log(x)
    if lx == 0.0:
        raise SingularityError("dF/dx is singular at x = 1")
    if kind.expanding:
        if lx < 0.0:
            raise DomainError(f"expanding map requires x >= 1, got {x}")
        if kind.relativistic:
            return (1.0 + y * lx) / math.sqrt(2.0 * lx * (2.0 + y * lx))
        return 0.5 / math.sqrt(lx)
    if lx > 0.0:
        raise DomainError(f"contracting map requires x <= 1, got {x}")
    if kind.relativistic:
        return (y * lx - 1.0) / math.sqrt(2.0 * lx * (y * lx - 2.0))
    return -0.5 / math.sqrt(-lx)


def d_forward_dy(kind: KernelKind, x: float, y: float = 0.0, quad_tol: float = QUAD_TOL) -> float:
    """Partial dF/dy; identically zero for classical kinds (the map has no y)."""
    _check_y(kind, y)
    if not kind.relativistic:
        return 0.0
    if kind.sphere:
        off = _offset(kind, x)
        return _em_sphere_dFdy(off, y) if kind.expanding else _g_sphere_dFdy(off, y)
    L = _cyl_upper_limit(kind, x)
    if L == 0.0:
        return 0.0
    sign = 1.0 if kind.expanding else -1.0
    return adaptive_quad(_cyl_dy_integrand(y, sign), 0.0, L, tol=quad_tol)


def collapse_endpoint(kind: KernelKind, y: float = 0.0) -> float:
    """F(0, y): the scaled center-arrival time of a contracting layer."""
    if kind.expanding:
        raise DomainError("expanding maps have no collapse endpoint")
    return forward_map(kind, 0.0, y)


def inverse_map(kind: KernelKind, f_target: float, y: float = 0.0) -> float:
    """Solve F(x, y) = f_target for the radius ratio x.

    Safeguarded Newton with bisection fallback on the monotone bracket;
    converges to |F(x) - f_target| <= 1e-12 * max(1, f_target).  Contracting
    kinds raise :class:`PastCollapseError` past the endpoint F(0, y).
    """
    _check_y(kind, y)
    if f_target < 0.0:
        raise DomainError(f"map values are nonnegative, got {f_target}")
    if f_target == 0.0:
        return 1.0
    if kind.sphere:
        return _invert_sphere(kind, f_target, y)
    return _invert_cylinder(kind, f_target, y)


def _invert_sphere(kind: KernelKind, f, y):
    em = kind.expanding
    rel = kind.relativistic
    if rel:
        if em:
            c1 = math.sqrt(2.0 * (2.0 + y)) / (1.0 + y)
            c32 = (2.0 + 3.0 * y) / 12.0
        else:
            c1 = math.sqrt(2.0 * (2.0 - y)) / (1.0 - y)
            c32 = (3.0 * y - 2.0) / 12.0
    else:
        c1, c32 = 2.0, (1.0 / 6.0) if em else (-1.0 / 6.0)

    def F_of_u(u):
        off = u * u
        if rel:
            return _em_sphere_F(off, y) if em else _g_sphere_F(off, y)
        return _em_sphere_cl_F(off) if em else _g_sphere_cl_F(off)

    def dF_du(u):
        off = u * u
        if off < SERIES_SWITCH:
            return c1 * (1.0 + 3.0 * c32 * off)
        if rel:
            d = _em_sphere_dFdw(off, y) if em else _g_sphere_dFde(off, y)
        else:
            d = math.sqrt((1.0 + off) / off) if em else math.sqrt((1.0 - off) / off)
        return 2.0 * u * d

    if em:
        u_hi = max(2.0 * f / c1, 1e-3)
        for _ in range(200):
            if F_of_u(u_hi) >= f:
                break
            u_hi *= 2.0
    else:
        f_end = F_of_u(1.0)
        # dF/du vanishes at the endpoint, so the last ~(tol)^(2/3) of u is flat;
        # snap map values within solver tolerance of F(0, y) to the center.
        if f >= f_end - 1e-12 * max(1.0, f_end):
            if f <= f_end * (1.0 + CLAMP_TOL):
                return 0.0
            raise PastCollapseError(
                f"map value {f} beyond collapse endpoint {f_end}", f_endpoint=f_end)
        u_hi = 1.0
    u = solve_monotone(F_of_u, dF_du, 0.0, u_hi, f, seed=min(f / c1, 0.999 * u_hi))
    return 1.0 + u * u if em else 1.0 - u * u


def _invert_cylinder(kind: KernelKind, f, y):
    em = kind.expanding
    rel = kind.relativistic
    sign = 1.0 if em else -1.0
    tol = min(QUAD_TOL, 1e-13 * max(1.0, f))
    integrand = _cyl_integrand(y, sign)

    if rel:
        def F_of_L(L):
            return adaptive_quad(integrand, 0.0, L, tol=tol) if L > 0.0 else 0.0
    elif em:
        def F_of_L(L):
            return 0.5 * math.sqrt(math.pi) * float(_erfi(L))
    else:
        def F_of_L(L):
            return 0.5 * math.sqrt(math.pi) * erf(L)

    def dF_dL(L):
        return float(integrand(L))

    if em:
        # The integrand is >= 1, so F(1) >= 1 covers f <= 1; past that, grow the
        # bracket in ln-x steps (each adds 1 to L^2, multiplying F by >= e) to
        # keep exp(L^2) evaluations bounded by ~e*f.
        L_hi = min(max(f, 1e-3), 1.0)
        for _ in range(900):
            if F_of_L(L_hi) >= f:
                break
            L_hi = math.sqrt(L_hi * L_hi + 1.0)
        seed = min(f, 0.9 * L_hi)
    else:
        L_hi = LN_CUTOFF
        f_end = F_of_L(L_hi)
        if f >= f_end:
            if f <= f_end * (1.0 + CLAMP_TOL):
                return math.exp(-L_hi * L_hi)
            raise PastCollapseError(
                f"map value {f} beyond collapse endpoint {f_end}", f_endpoint=f_end)
        if rel:
            seed = min(f, 1.0)
        else:
            seed = erfinv(min(2.0 * f / math.sqrt(math.pi), 1.0 - 1e-16))
    L = solve_monotone(F_of_L, dF_dL, 0.0, L_hi, f, seed=seed)
    return math.exp(sign * L * L)
