"""Adaptive Simpson quadrature used as the independent numerical oracle.

Every closed-form energy expression in :mod:`thzook.analytics` is an erf
evaluation; this module integrates the underlying Gaussian kernels directly so
the two routes share no code. The subdivision rule and tolerances are fixed so
oracle results are bit-reproducible across runs.
"""

from __future__ import annotations

import math
from collections.abc import Callable

# Subdivision stops once the Richardson error estimate drops below
# REL_SCALE_TOL times the caller-supplied scale, or at MAX_BISECTIONS depth.
REL_SCALE_TOL = 1e-15
MAX_BISECTIONS = 60


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    scale: float,
    max_depth: int = MAX_BISECTIONS,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance 1e-15 * scale.

    Args:
        f: Smooth scalar integrand.
        a: Lower bound.
        b: Upper bound; may be below ``a`` (sign handled).
        scale: Magnitude of the result used to set the absolute tolerance.
            Must be positive.
        max_depth: Bisection cap per interval.

    Returns:
        The integral estimate (Richardson-extrapolated).
    """
    if scale <= 0.0 or not math.isfinite(scale):
        raise ValueError("scale must be a positive finite number")
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, scale, max_depth)

    tol = REL_SCALE_TOL * scale

    def simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(
        lo: float,
        hi: float,
        flo: float,
        fmid: float,
        fhi: float,
        whole: float,
        eps: float,
        depth: int,
    ) -> float:
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flm = f(lmid)
        frm = f(rmid)
        left = simpson(flo, flm, fmid, mid - lo)
        right = simpson(fmid, frm, fhi, hi - mid)
        err = (left + right - whole) / 15.0
        if depth >= max_depth or abs(err) <= eps:
            return left + right + err
        return recurse(lo, mid, flo, flm, fmid, left, eps / 2.0, depth + 1) + recurse(
            mid, hi, fmid, frm, fhi, right, eps / 2.0, depth + 1
        )

    fa = f(a)
    fb = f(b)
    fm = f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0)


def gaussian_power_integral(
    lower: float, upper: float, center: float, sigma: float, p_a: float
) -> float:
    """Numerically integrate the slot-energy kernel over ``[lower, upper]``.

    The kernel is P_a/(pi sigma^2) * exp(-((v - center)/sigma)^2), whose total
    mass is P_a/(sqrt(pi) sigma); the closed forms in
    :func:`thzook.analytics.gaussian_slot_energy` are its exact antiderivative.
    The total mass serves as the tolerance scale.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    coeff = p_a / (math.pi * sigma * sigma)

    def kernel(v: float) -> float:
        u = (v - center) / sigma
        return coeff * math.exp(-u * u)

    scale = p_a / (math.sqrt(math.pi) * sigma)
    return adaptive_simpson(kernel, lower, upper, scale)
