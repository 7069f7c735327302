"""Quadrature for the profile exponent integral.

The profile of the radial minimizer is ``H = exp(I)`` with

    I(a, b) = int_a^b ((p-1)/(1-s) + 1/s) sqrt(s) / (2 (2-p) sqrt(1-s)) ds,

whose integrand behaves like ``s**-1/2`` at 0 and ``(1-s)**-3/2`` at 1. The
adaptive route splits at ``s = 1/2`` and integrates the lower half in
``u = sqrt(s)`` and the upper half in ``v = sqrt(1-s)``; both transformed
integrands are bounded. The composite Gauss-Legendre rule is kept as a
fixed-order cross-check that shares no adaptivity with the main route.
"""

from __future__ import annotations

import math
import os
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import QuadratureError, SingularityError

DEFAULT_TOL = 1e-10
SUBDIVISION_LIMIT = 2**15


def quad_tol(default: float = DEFAULT_TOL) -> float:
    """Absolute quadrature tolerance; ``ANNULUS_QUAD_TOL`` overrides ``default``."""
    raw = os.environ.get("ANNULUS_QUAD_TOL")
    if raw is None:
        return default
    tol = float(raw)
    if not tol > 0:
        raise ValueError(f"ANNULUS_QUAD_TOL must be positive, got {raw!r}")
    return tol


def exponent_integrand(s, p: float):
    """Integrand of the profile exponent in the original variable ``s``."""
    s = np.asarray(s, dtype=float)
    return ((p - 1) / (1 - s) + 1 / s) * np.sqrt(s) / (2 * (2 - p) * np.sqrt(1 - s))


def _f_u(u: float, p: float) -> float:
    # s = u^2
    w = 1.0 - u * u
    return (1.0 + (p - 1) * u * u / w) / ((2 - p) * math.sqrt(w))


def _f_v(v: float, p: float) -> float:
    # s = 1 - v^2
    w = 1.0 - v * v
    return ((p - 1) / (v * v) + 1.0 / w) * math.sqrt(w) / (2 - p)


def adaptive(f: Callable[[float], float], a: float, b: float, tol: float | None = None) -> float:
    """``scipy.integrate.quad`` with a hard failure on non-convergence."""
    if tol is None:
        tol = quad_tol()
    if a == b:
        return 0.0
    out = integrate.quad(f, a, b, epsabs=tol, epsrel=1e-13, limit=SUBDIVISION_LIMIT, full_output=1)
    val, err = out[0], out[1]
    # a fourth element is QUADPACK's warning message (ier > 0)
    if len(out) > 3 and err > tol:
        raise QuadratureError(f"quadrature on [{a!r}, {b!r}] did not converge: {out[3]}", val, err)
    if not math.isfinite(val):
        raise QuadratureError(f"non-finite quadrature on [{a!r}, {b!r}]", val, err)
    return val


def profile_exponent(a: float, b: float, p: float, tol: float | None = None) -> float:
    """``I(a, b)`` for ``0 <= a <= b < 1`` and ``p`` in ``[1, 2)``."""
    if not (0.0 <= a <= b < 1.0):
        raise SingularityError(f"need 0 <= a <= b < 1, got a={a!r}, b={b!r}")
    total = 0.0
    mid = 0.5
    if a < mid:
        hi = min(b, mid)
        total += adaptive(lambda u: _f_u(u, p), math.sqrt(a), math.sqrt(hi), tol)
    if b > mid:
        lo = max(a, mid)
        total += adaptive(lambda v: _f_v(v, p), math.sqrt(1 - b), math.sqrt(1 - lo), tol)
    return total


def gauss_legendre_composite(
    f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int = 200, order: int = 10
) -> float:
    """Fixed-order composite Gauss-Legendre rule on equal panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    centre = 0.5 * (edges[:-1] + edges[1:])
    nodes = centre[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * f(nodes)))


def profile_exponent_fixed(a: float, b: float, p: float, panels: int = 200, order: int = 10) -> float:
    """Cross-check for :func:`profile_exponent`: one ``u = sqrt(s)`` sweep, no splitting."""
    if not (0.0 <= a <= b < 1.0):
        raise SingularityError(f"need 0 <= a <= b < 1, got a={a!r}, b={b!r}")

    def g(u):
        w = 1.0 - u * u
        return (1.0 + (p - 1) * u * u / w) / ((2 - p) * np.sqrt(w))

    return gauss_legendre_composite(g, math.sqrt(a), math.sqrt(b), panels, order)
