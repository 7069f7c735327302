"""Radial minimizer profiles ``H`` for the three exponent regimes.

* ``p = 1``: closed form ``H(t) = exp(arccot sqrt(b^2 - 1) - arccot sqrt(b^2 t^2 - 1))``,
  which exists only below the threshold ``R0(r)``.
* ``1 < p < 2``: shooting on ``tau = g(1)`` and quadrature of the profile exponent.
* ``p = 2``: the power map ``H(t) = t^alpha`` with ``alpha = log R / log r``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NonexistenceError
from .geometry import REGIME_P1, REGIME_P2, REGIME_SHOOTING, AnnulusPair, regime_of
from .gfield import GParams, g_rhs, g_tau_grid
from .quadrature import profile_exponent
from .shooting import TauSolution, solve_tau

DEFAULT_NODES = 1000
# relative slack on log R when deciding the p = 1 boundary case
THRESHOLD_RTOL = 1e-12
BOUNDARY_CASE = "boundary-case"


def arccot(x):
    """Branch with values in (0, pi/2] for x >= 0."""
    return np.arctan2(1.0, x)


def p1_modulus_bound(r: float) -> float:
    """``pi/2 - arctan(1/sqrt(r^2 - 1))``, the largest admissible ``log R`` at ``p = 1``."""
    if not r > 1.0:
        raise DomainError(f"r must exceed 1, got {r!r}")
    return math.pi / 2 - math.atan(1.0 / math.sqrt(r * r - 1.0))


def p1_threshold(r: float) -> float:
    """``R0(r)``; increases to ``e^(pi/2)`` as ``r -> inf``."""
    return math.exp(p1_modulus_bound(r))


def _p1_status(r: float, R: float) -> str:
    """'inside', 'boundary' or 'outside' relative to the p = 1 existence region."""
    bound = p1_modulus_bound(r)
    L = math.log(R)
    if abs(L - bound) <= THRESHOLD_RTOL * bound:
        return "boundary"
    return "inside" if L < bound else "outside"


def p1_b(r: float, R: float) -> float:
    """Constant ``b >= 1`` of the ``p = 1`` profile through ``H(r) = R``."""
    if not R > 1.0:
        raise DomainError(f"R must exceed 1, got {R!r}")
    status = _p1_status(r, R)
    if status == "outside":
        raise NonexistenceError(r, R, p1_threshold(r))
    if status == "boundary":
        return 1.0
    L = math.log(R)
    b = math.sqrt(1 + r * r - 2 * r * math.cos(L)) / (r * math.sin(L))
    return max(b, 1.0)


def _p1_profile(t, b: float):
    t = np.asarray(t, dtype=float)
    return np.exp(arccot(math.sqrt(b * b - 1)) - arccot(np.sqrt(np.maximum(b * b * t * t - 1, 0.0))))


@dataclass(frozen=True, eq=False)
class RadialMinimizer:
    """Tabulated radial minimizer ``h(t e^{i theta}) = H(t) e^{i theta}``.

    ``b_or_tau`` holds ``b`` (p = 1), ``tau`` (shooting) or ``alpha`` (p = 2).
    """

    p: float
    annuli: AnnulusPair
    regime: str
    b_or_tau: float
    t_table: np.ndarray
    H_table: np.ndarray
    dH_table: np.ndarray
    g_table: np.ndarray
    c: float
    solution: TauSolution | None = None
    flags: tuple[str, ...] = field(default=())

    @property
    def r(self) -> float:
        return self.annuli.r

    @property
    def R(self) -> float:
        return self.annuli.R

    @cached_property
    def energy(self) -> float:
        from .energy import radial_energy

        return radial_energy(self)

    @cached_property
    def _pchip(self) -> PchipInterpolator:
        return PchipInterpolator(self.t_table, self.H_table)

    def _check(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t < 1.0) or np.any(t > self.r):
            raise DomainError(f"t must lie in [1, r={self.r!r}]")
        return t

    def g_at(self, t):
        """Exact ``g(t)``."""
        t = self._check(t)
        if self.regime == REGIME_P1:
            return 1.0 / (self.b_or_tau * t) ** 2
        if self.regime == REGIME_P2:
            a = self.b_or_tau
            return np.full_like(t, a * a / (1 + a * a))
        return g_tau_grid(t, self.solution.params)

    def g_rate(self, t):
        """Exact ``g'(t)``."""
        t = self._check(t)
        if self.regime == REGIME_P1:
            return -2.0 * self.g_at(t) / t
        if self.regime == REGIME_P2:
            return np.zeros_like(t)
        g = self.g_at(t)
        return np.vectorize(g_rhs)(t, g, self.p)

    def log_derivative(self, t):
        """``H'/H`` from the first integral ``t H'/H = sqrt(g / (1 - g))``."""
        t = self._check(t)
        if self.regime == REGIME_P1:
            b = self.b_or_tau
            with np.errstate(divide="ignore"):
                return 1.0 / (t * np.sqrt(np.maximum(b * b * t * t - 1, 0.0)))
        if self.regime == REGIME_P2:
            return self.b_or_tau / t
        g = self.g_at(t)
        return np.sqrt(g / (1 - g)) / t

    def H_exact(self, t):
        """``H(t)`` without interpolation: closed forms, or fresh quadrature."""
        t = self._check(t)
        if self.regime == REGIME_P1:
            return _p1_profile(t, self.b_or_tau)
        if self.regime == REGIME_P2:
            return t**self.b_or_tau
        flat = t.ravel()
        order = np.argsort(flat)
        g = g_tau_grid(flat[order], self.solution.params)
        log_h = _cumulative_exponent(g, self.solution.params)
        out = np.empty_like(flat)
        out[order] = np.exp(log_h)
        return out.reshape(t.shape)

    @property
    def P_table(self) -> np.ndarray:
        t, g, p = self.t_table, self.g_table, self.p
        return t ** (2 - p) * (1 - g) ** ((1 - p) / 2) * np.sqrt(g)

    def to_csv(self, path: str | Path) -> None:
        """Profile table with header ``t,H,dH,g,P``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "H", "dH", "g", "P"])
            for row in zip(self.t_table, self.H_table, self.dH_table, self.g_table, self.P_table):
                w.writerow([f"{v:.17g}" for v in row])


def _cumulative_exponent(g_desc: np.ndarray, params: GParams) -> np.ndarray:
    """``log H`` at nodes whose ``g`` values decrease from (at most) ``tau``."""
    out = np.empty_like(g_desc)
    acc = 0.0
    prev = params.tau
    for i, gi in enumerate(g_desc):
        acc += profile_exponent(min(gi, prev), prev, params.p)
        prev = min(gi, prev)
        out[i] = acc
    return out


def H_eval(m: RadialMinimizer, t: float) -> tuple[float, float]:
    """``(H(t), H'(t))``; monotone cubic on the table for the shooting regime."""
    t_arr = m._check(t)
    if m.regime == REGIME_SHOOTING:
        H = m._pchip(t_arr)
    else:
        H = m.H_exact(t_arr)
    dH = H * m.log_derivative(t_arr)
    return float(H), float(dH)


def build_minimizer(r: float, R: float, p: float, n_nodes: int = DEFAULT_NODES) -> RadialMinimizer:
    """Radial minimizer of the weighted p-energy from ``A(1, r)`` onto ``A(1, R)``.

    Raises :class:`NonexistenceError` for ``p = 1`` above the threshold. At
    exactly the threshold the profile is built with ``b = 1`` and flagged
    ``boundary-case``.
    """
    annuli = AnnulusPair(r, R)
    regime = regime_of(p)
    if n_nodes < 3:
        raise DomainError(f"need at least 3 nodes, got {n_nodes}")
    t = np.geomspace(1.0, r, n_nodes)
    t[0], t[-1] = 1.0, r
    flags: tuple[str, ...] = ()
    solution = None

    if regime == REGIME_P1:
        if _p1_status(r, R) == "boundary":
            flags = (BOUNDARY_CASE,)
            warnings.warn(f"p=1 at the existence threshold R0({r!r}); b=1", stacklevel=2)
        b = p1_b(r, R)
        H = _p1_profile(t, b)
        g = 1.0 / (b * t) ** 2
        param, c = b, 1.0 / b
    elif regime == REGIME_P2:
        alpha = math.log(R) / math.log(r)
        H = t**alpha
        g = np.full_like(t, alpha * alpha / (1 + alpha * alpha))
        param, c = alpha, alpha
    else:
        solution = solve_tau(r, R, p)
        g = g_tau_grid(t, solution.params)
        H = np.exp(_cumulative_exponent(g, solution.params))
        param, c = solution.tau, solution.c

    m = RadialMinimizer(
        p=p,
        annuli=annuli,
        regime=regime,
        b_or_tau=param,
        t_table=t,
        H_table=H,
        dH_table=np.zeros_like(t),
        g_table=g,
        c=c,
        solution=solution,
        flags=flags,
    )
    object.__setattr__(m, "dH_table", H * m.log_derivative(t))
    for arr in (m.t_table, m.H_table, m.dH_table, m.g_table):
        arr.setflags(write=False)
    return m
