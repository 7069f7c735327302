"""Energy of radial profiles and sampled maps, the sharp lower bound, diagnostics.

For a radial map ``H(t) e^{i theta}`` the weighted p-energy is

    F_p = 2 pi int_1^r t (1/t^2 + (H'/H)^2)^(p/2) dt,

and for any such profile it is bounded below by

    2 pi int_1^r t^(1-p) (1 - p g) / (1 - g)^(p/2) dt + 2 pi p c log R,

with ``g`` and ``c`` taken from the minimizer; equality holds exactly on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SingularityError
from .geometry import REGIME_P1, REGIME_P2, TWO_PI, PolarGridMap
from .gfield import g_tau_at
from .minimizer import RadialMinimizer
from .quadrature import adaptive, quad_tol
from .serialize import dumps
from .shooting import TauSolution

ENERGY_TOL = 1e-9
MIN_GRID = 16


def _energy_tol() -> float:
    return quad_tol(ENERGY_TOL)


def _radial_density(t: float, ell: float, p: float) -> float:
    return t * (1.0 / (t * t) + ell * ell) ** (p / 2)


def radial_energy(m: RadialMinimizer) -> float:
    """Energy of the radial map built on ``m`` by adaptive quadrature in ``t``."""
    r, p = m.r, m.p
    tol = _energy_tol()
    if m.regime == REGIME_P1:
        b = m.b_or_tau

        # t = 1 + u^2 absorbs the 1/sqrt(t - 1) singularity of the b = 1 case
        def f(u: float) -> float:
            t = 1.0 + u * u
            bt_minus = (b - 1.0) + b * u * u
            return 2.0 * u * b * t / math.sqrt(bt_minus * (b * t + 1.0))

        return TWO_PI * adaptive(f, 0.0, math.sqrt(r - 1.0), tol)
    if m.regime == REGIME_P2:
        a = m.b_or_tau
        return TWO_PI * adaptive(lambda t: _radial_density(t, a / t, p), 1.0, r, tol)
    params = m.solution.params

    def f(t: float) -> float:
        g = g_tau_at(t, params)
        return _radial_density(t, math.sqrt(g / (1 - g)) / t, p)

    return TWO_PI * adaptive(f, 1.0, r, tol)


def _bound_density(t: float, g: float, p: float) -> float:
    return t ** (1 - p) * (1 - p * g) / (1 - g) ** (p / 2)


def lower_bound(src: RadialMinimizer | TauSolution) -> float:
    """Sharp lower bound for the energy of radial maps ``A(1, r) -> A(1, R)``."""
    if isinstance(src, TauSolution):
        params, p = src.params, src.p
        tol = _energy_tol()
        integral = adaptive(lambda t: _bound_density(t, g_tau_at(t, params), p), 1.0, src.r, tol)
        return TWO_PI * integral + TWO_PI * p * src.c * math.log(src.R)
    m = src
    r, R, p = m.r, m.R, m.p
    if m.regime == REGIME_P1:
        b = m.b_or_tau
        acsc = lambda x: math.asin(1.0 / x)  # noqa: E731
        head = (-math.sqrt(b * b - 1) + math.sqrt(b * b * r * r - 1) - acsc(b) + acsc(b * r)) / b
        return TWO_PI * head + TWO_PI * math.log(R) / b
    if m.regime == REGIME_P2:
        g = float(m.g_table[0])
        return TWO_PI * math.log(r) * (1 - 2 * g) / (1 - g) + TWO_PI * 2 * m.c * math.log(R)
    return lower_bound(m.solution)


def pointwise_chain(t, g, ell, p: float, P=None) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the pointwise inequality behind :func:`lower_bound`.

    ``ell`` is ``H'/H`` of any profile; ``g`` (and ``P``) belong to the
    minimizer. Returns ``(lhs, rhs)`` with ``lhs >= rhs``.
    """
    t = np.asarray(t, dtype=float)
    g = np.asarray(g, dtype=float)
    ell = np.asarray(ell, dtype=float)
    if P is None:
        P = t ** (2 - p) * (1 - g) ** ((1 - p) / 2) * np.sqrt(g)
    lhs = t * (1 / t**2 + ell**2) ** (p / 2)
    rhs = t ** (1 - p) * (1 - p * g) / (1 - g) ** (p / 2) + P * p * ell
    return lhs, rhs


class PProfile(NamedTuple):
    t: np.ndarray
    P: np.ndarray
    c: float
    max_dev: float


def p_profile(m: RadialMinimizer) -> PProfile:
    """Table of ``P(t) = t^(2-p) (1-g)^((1-p)/2) sqrt(g)`` and its worst relative drift from ``c``."""
    P = m.P_table
    dev = float(np.max(np.abs(P - m.c)) / abs(m.c))
    return PProfile(m.t_table, P, m.c, dev)


def el_rhs(t, H, dH, p: float):
    """Second derivative forced by the radial Euler-Lagrange equation."""
    num = dH * ((p - 3) * H**3 + t * H**2 * dH - t**2 * H * dH**2 + (p - 1) * t**3 * dH**3)
    den = t * H**3 + (p - 1) * t**3 * H * dH**2
    return num / den


def el_residual_values(t, H, dH, d2H, p: float) -> np.ndarray:
    """Normalized pointwise residual of the radial Euler-Lagrange equation.

    For ``p = 1`` the polynomial form ``-t H H'^2 + t^2 H'^3 + H^2 (2 H' + t H'') = 0``
    is used and normalized by the sum of the term magnitudes.
    """
    t, H, dH, d2H = (np.asarray(a, dtype=float) for a in (t, H, dH, d2H))
    if p == 1.0:
        terms = (-t * H * dH**2, t**2 * dH**3, 2 * H**2 * dH, t * H**2 * d2H)
        total = sum(terms)
        scale = sum(np.abs(x) for x in terms)
        return np.abs(total) / scale
    rhs = el_rhs(t, H, dH, p)
    return np.abs(d2H - rhs) / (np.abs(d2H) + np.abs(rhs) + np.abs(dH) / t)


def el_residual(m: RadialMinimizer) -> float:
    """Worst residual over interior nodes; ``H''`` from differentiating the first integral."""
    t = m.t_table[1:-1]
    H = m.H_table[1:-1]
    g = m.g_at(t)
    gdot = m.g_rate(t)
    w = np.sqrt(g / (1 - g))
    ell = w / t
    wdot = gdot / (2 * w * (1 - g) ** 2)
    ell_dot = wdot / t - w / t**2
    dH = H * ell
    d2H = H * (ell**2 + ell_dot)
    return float(np.max(el_residual_values(t, H, dH, d2H, m.p)))


def _periodic_diff(f: np.ndarray, jump: float, dtheta: float) -> np.ndarray:
    out = np.empty_like(f)
    out[:, 1:-1] = f[:, 2:] - f[:, :-2]
    out[:, 0] = f[:, 1] - (f[:, -1] - jump)
    out[:, -1] = (f[:, 0] + jump) - f[:, -2]
    out *= 1.0 / (2.0 * dtheta)
    return out


def polar_gradients(m: PolarGridMap) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """``(d_t log rho, d_theta log rho, d_t Theta, d_theta Theta)`` by finite differences.

    Centered in the interior, second-order one-sided at the radial ends,
    periodic in ``theta`` with the winding jump added to ``Theta``.
    """
    if np.any(~np.isfinite(m.rho)) or np.any(~np.isfinite(m.theta_val)):
        raise DomainError("map samples contain NaN or infinite values")
    if np.any(m.rho <= 0):
        raise SingularityError("rho must be positive at every sample")
    lr = np.log(m.rho)
    lr_t = np.gradient(lr, m.t_grid, axis=0, edge_order=2)
    th_t = np.gradient(m.theta_val, m.t_grid, axis=0, edge_order=2)
    lr_th = _periodic_diff(lr, 0.0, m.dtheta)
    th_th = _periodic_diff(m.theta_val, TWO_PI * m.winding, m.dtheta)
    return lr_t, lr_th, th_t, th_th


def grid_energy(m: PolarGridMap, p: float) -> float:
    """Weighted p-energy of a sampled map.

    Uses ``||Dh|| / |h| = sqrt(|grad log rho|^2 + |grad Theta|^2)``;
    trapezoidal in ``t``, periodic trapezoidal in ``theta``.
    """
    nt, nth = m.shape
    if nt < MIN_GRID or nth < MIN_GRID:
        raise DomainError(f"grid must be at least {MIN_GRID}x{MIN_GRID}, got {nt}x{nth}")
    return energy_from_gradients(polar_gradients(m), m.t_grid, m.dtheta, p)


def energy_from_gradients(grads, t_grid: np.ndarray, dtheta: float, p: float) -> float:
    """Quadrature step of :func:`grid_energy` on precomputed gradients."""
    lr_t, lr_th, th_t, th_th = grads
    t = t_grid[:, None]
    q = lr_t * lr_t
    q += th_t * th_t
    ang = lr_th * lr_th
    ang += th_th * th_th
    ang /= t * t
    q += ang
    if p == 2.0:
        dens = q
    elif p == 1.0:
        dens = np.sqrt(q, out=q)
    else:
        dens = np.power(q, p / 2, out=q)
    dens *= t
    ring = dens.sum(axis=1) * dtheta
    value = float(np.trapezoid(ring, t_grid))
    if not math.isfinite(value):
        raise DomainError("grid energy is not finite")
    return value


@dataclass(frozen=True)
class EnergyReport:
    energy: float
    lower_bound: float
    gap: float
    p_const_dev: float
    el_residual: float
    nt: int | None = None
    ntheta: int | None = None

    @property
    def normalized_energy(self) -> float:
        """Energy divided by ``2 pi``."""
        return self.energy / TWO_PI

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "normalized_energy": self.normalized_energy,
            "lower_bound": self.lower_bound,
            "gap": self.gap,
            "p_const_dev": self.p_const_dev,
            "el_residual": self.el_residual,
            "nt": self.nt,
            "ntheta": self.ntheta,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def energy_report(m: RadialMinimizer, grid_map: PolarGridMap | None = None) -> EnergyReport:
    """Report for ``m``; with ``grid_map`` the energy is that of the sampled map."""
    lb = lower_bound(m)
    if grid_map is None:
        energy, nt, nth = m.energy, None, None
    else:
        energy = grid_energy(grid_map, m.p)
        nt, nth = grid_map.shape
    return EnergyReport(
        energy=energy,
        lower_bound=lb,
        gap=energy - lb,
        p_const_dev=p_profile(m).max_dev,
        el_residual=el_residual(m),
        nt=nt,
        ntheta=nth,
    )
