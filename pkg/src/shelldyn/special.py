"""Scalar special functions and adaptive quadrature used by the characteristic maps.

Everything here is elementary enough to keep under direct control: the error
function wraps libm, its inverse is a Newton iteration on ``erf``, ``arccosh``
is evaluated in a cancellation-safe ``log1p`` form, and the quadrature is an
adaptive Gauss-Kronrod G7/K15 rule with a subdivision cap.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, ToleranceNotMetError

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)

# 15-point Kronrod nodes on [-1, 1] and the paired weights.  The 7 Gauss
# nodes are the odd-indexed entries.
_XK = np.array([
    -0.9914553711208126, -0.9491079123427585, -0.8648644233597691,
    -0.7415311855993944, -0.5860872354676911, -0.4058451513773972,
    -0.2077849550078985, 0.0,
    0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
    0.7415311855993944, 0.8648644233597691, 0.9491079123427585,
    0.9914553711208126,
])
_WK = np.array([
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552592, 0.16900472663926790, 0.19035057806478540,
    0.20443294007529889, 0.20948214108472782,
    0.20443294007529889, 0.19035057806478540, 0.16900472663926790,
    0.14065325971552592, 0.10479001032225018, 0.06309209262997855,
    0.02293532201052922,
])
_WG = np.array([
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
    0.1294849661688697,
])


def erf(u):
    """Error function, accurate to a few ulp (libm)."""
    return math.erf(u)


def erfinv(v):
    """Inverse error function by Newton iteration on ``erf``.

    The seed is Winitzki's approximation (relative error below 2e-3), after
    which three to four Newton steps reach machine precision.
    """
    if not -1.0 < v < 1.0:
        raise DomainError(f"erfinv requires |v| < 1, got {v}")
    if v == 0.0:
        return 0.0
    # Winitzki 2008 seed.
    a = 0.147
    ln1mv2 = math.log1p(-v * v)
    term = 2.0 / (math.pi * a) + 0.5 * ln1mv2
    x = math.copysign(math.sqrt(math.sqrt(term * term - ln1mv2 / a) - term), v)
    for _ in range(60):
        err = math.erf(x) - v
        dx = err / (_TWO_OVER_SQRT_PI * math.exp(-x * x))
        x -= dx
        if abs(dx) <= 1e-16 * (1.0 + abs(x)):
            break
    return x


def arccosh(u):
    """arccosh(u) = ln(u + sqrt(u^2 - 1)), evaluated without cancellation near u = 1."""
    if u < 1.0:
        raise DomainError(f"arccosh requires u >= 1, got {u}")
    return arccosh1p(u - 1.0)


def arccosh1p(e):
    """arccosh(1 + e) for e >= 0, stable for small e."""
    if e < 0.0:
        raise DomainError(f"arccosh argument below 1 by {-e}")
    return math.log1p(e + math.sqrt(e * (e + 2.0)))


def _gk_panel(f, a, b):
    """One G7/K15 panel on [a, b]; returns (kronrod, error_estimate)."""
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fv = np.asarray(f(mid + h * _XK), dtype=float)
    resk = h * float(np.dot(_WK, fv))
    resg = h * float(np.dot(_WG, fv[1::2]))
    diff = abs(resk - resg)
    # Sharpened QUADPACK-style estimate; only sharpens below (1/200)^3.
    err = (200.0 * diff) ** 1.5 if diff < 1.25e-7 else diff
    return resk, err


def adaptive_quad(f, a, b, tol=1e-11, max_depth=60, max_intervals=4096):
    """Integrate ``f`` over [a, b] to absolute-plus-relative tolerance ``tol``.

    ``f`` must accept an ndarray of nodes and return the integrand values.
    The interval with the largest error estimate is bisected until
    ``sum(err) <= tol * (1 + |integral|)`` or the subdivision cap is hit, in
    which case ``ToleranceNotMetError`` carries the best estimate.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0
    val, err = _gk_panel(f, a, b)
    intervals = [(err, a, b, val, 0)]
    while True:
        total = sum(it[3] for it in intervals)
        total_err = sum(it[0] for it in intervals)
        if total_err <= tol * (1.0 + abs(total)):
            return sign * total
        intervals.sort(key=lambda it: it[0])
        worst = intervals.pop()
        _, lo, hi, _, depth = worst
        mid = 0.5 * (lo + hi)
        if depth >= max_depth or mid <= lo or mid >= hi or len(intervals) + 2 > max_intervals:
            raise ToleranceNotMetError(
                f"quadrature stalled at error estimate {total_err:.3e}",
                best_estimate=sign * total,
                error_estimate=total_err,
            )
        v1, e1 = _gk_panel(f, lo, mid)
        v2, e2 = _gk_panel(f, mid, hi)
        intervals.append((e1, lo, mid, v1, depth + 1))
        intervals.append((e2, mid, hi, v2, depth + 1))


def solve_monotone(f, dfdx, lo, hi, target, seed=None, rtol=1e-12, max_iter=120):
    """Solve ``f(x) = target`` for increasing ``f`` on [lo, hi].

    Safeguarded Newton: steps leaving the current bracket fall back to
    bisection.  Convergence when ``|f(x) - target| <= rtol * max(1, |target|)``
    or the bracket collapses to rounding width.
    """
    tol = rtol * max(1.0, abs(target))
    x = seed if seed is not None and lo < seed < hi else 0.5 * (lo + hi)
    f_lo = None
    for _ in range(max_iter):
        fx = f(x) - target
        if abs(fx) <= tol:
            return x
        if fx > 0.0:
            hi = x
        else:
            lo = x
            f_lo = fx
        d = dfdx(x)
        x_new = x - fx / d if d > 0.0 else math.nan
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if hi - lo <= 1e-16 * (1.0 + abs(x)):
            return x_new
        x = x_new
    # Monotone bracket plus bisection fallback cannot stall unless f is noisy
    # at rounding level; return the midpoint as the best available answer.
    _ = f_lo
    return x
