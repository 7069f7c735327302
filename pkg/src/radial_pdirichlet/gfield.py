"""The auxiliary field ``g`` behind the first integral, for ``1 < p < 2``.

Along a critical radial profile ``t H'/H = sqrt(g / (1 - g))`` where ``g``
solves ``g' = 2 (2-p) (g-1) g / (t + (p-2) t g)``. That ODE integrates in
closed form: ``t = k(g)`` with

    k(s) = b exp(((p-1) log(1-s) - log s) / (2 (2-p))),

so ``g`` is evaluated by inverting the strictly decreasing ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError, SingularityError
from .roots import bisect, bisect_decreasing

# relative guard keeping bisection brackets off the log singularities
ENDPOINT_GUARD = 1e-15


def _require_open_p(p: float) -> None:
    if p == 2.0:
        raise RegimeError("p = 2 has no k(s) representation; use the power-map closed form")
    if not (1.0 < p < 2.0):
        raise RegimeError(f"g-field requires 1 < p < 2, got p={p!r}")


def _require_unit(s: float, name: str = "s") -> None:
    if not (0.0 < s < 1.0):
        raise SingularityError(f"{name} must lie strictly inside (0, 1), got {s!r}")


def g_rhs(t: float, g: float, p: float) -> float:
    """Right-hand side of the ``g`` ODE; negative for ``p < 2``, zero at ``p = 2``."""
    if not (1.0 < p <= 2.0):
        raise RegimeError(f"g_rhs requires 1 < p <= 2, got p={p!r}")
    if not (0.0 < g < 1.0):
        raise DomainError(f"g must lie in (0, 1), got {g!r}")
    if t < 1.0:
        raise DomainError(f"t must be >= 1, got {t!r}")
    return 2 * (2 - p) * (g - 1) * g / (t + (p - 2) * t * g)


def _log_k_shape(s, p: float):
    return ((p - 1) * np.log1p(-s) - np.log(s)) / (2 * (2 - p))


def k_of_s(s: float, b: float, p: float) -> float:
    _require_open_p(p)
    _require_unit(s)
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    return b * math.exp(((p - 1) * math.log1p(-s) - math.log(s)) / (2 * (2 - p)))


def b_of_tau(tau: float, p: float) -> float:
    """Constant ``b`` normalizing ``k(tau) = 1``, i.e. ``g(1) = tau``."""
    _require_open_p(p)
    _require_unit(tau, "tau")
    return math.exp(((p - 1) * math.log1p(-tau) - math.log(tau)) / (2 * (p - 2)))


def B_func(s: float, tau: float, r: float, p: float) -> float:
    """``log k(s) - log r`` with ``b = b(tau)``; strictly decreasing, root at ``g(r)``."""
    _require_open_p(p)
    _require_unit(s)
    _require_unit(tau, "tau")
    return (
        ((p - 1) * (math.log1p(-s) - math.log1p(-tau)) - (math.log(s) - math.log(tau))) / (2 * (2 - p))
        - math.log(r)
    )


def tau_circ(tau: float, r: float, p: float) -> float:
    """Upper bound for ``s_circ``: ``1 / (1 + r^(4-2p) (1/tau - 1))``."""
    return 1.0 / (1.0 + r ** (4 - 2 * p) * (1.0 / tau - 1.0))


def solve_s_circ(tau: float, r: float, p: float) -> float:
    """Unique root of :func:`B_func` in ``(0, tau)``; this is ``g_tau(r)``."""
    _require_open_p(p)
    _require_unit(tau, "tau")
    if not r > 1.0:
        raise DomainError(f"r must exceed 1, got {r!r}")
    lo = tau * 1e-300
    hi = tau * (1.0 - ENDPOINT_GUARD)
    return bisect(lambda s: B_func(s, tau, r, p), lo, hi)


@dataclass(frozen=True)
class GParams:
    """Shooting state: ``g(1) = tau``, ``g(r) = s_circ``, ``k(tau; b) = 1``."""

    p: float
    tau: float
    b: float
    s_circ: float
    tau_circ: float
    r: float

    @classmethod
    def from_tau(cls, tau: float, r: float, p: float) -> "GParams":
        return cls(
            p=p,
            tau=tau,
            b=b_of_tau(tau, p),
            s_circ=solve_s_circ(tau, r, p),
            tau_circ=tau_circ(tau, r, p),
            r=r,
        )

    @property
    def c(self) -> float:
        """Conserved value ``P = t^(2-p) (1-g)^((1-p)/2) sqrt(g)``, evaluated at ``t = r``."""
        s, p = self.s_circ, self.p
        return self.r ** (2 - p) * (1 - s) ** ((1 - p) / 2) * math.sqrt(s)


def _check_t(t, r: float) -> None:
    t = np.asarray(t)
    if np.any(t < 1.0) or np.any(t > r):
        raise DomainError(f"t must lie in [1, r={r!r}]")


def g_tau_at(t: float, params: GParams) -> float:
    """``g_tau(t)`` by bisection on ``log k(s) = log t``."""
    _check_t(t, params.r)
    if t == 1.0:
        return params.tau
    p, tau = params.p, params.tau
    lo = max(params.s_circ * (1 - 1e-12), tau * 1e-300)
    hi = min(tau * (1 + 1e-12), 1 - ENDPOINT_GUARD)
    log_b = math.log(params.b)
    log_t = math.log(t)

    def f(s: float) -> float:
        return log_b + ((p - 1) * math.log1p(-s) - math.log(s)) / (2 * (2 - p)) - log_t

    return bisect(f, lo, hi)


def g_tau_grid(t: np.ndarray, params: GParams) -> np.ndarray:
    """Vectorized :func:`g_tau_at`."""
    t = np.asarray(t, dtype=float)
    _check_t(t, params.r)
    p, tau = params.p, params.tau
    lo = max(params.s_circ * (1 - 1e-12), tau * 1e-300)
    hi = min(tau * (1 + 1e-12), 1 - ENDPOINT_GUARD)
    log_b = math.log(params.b)

    def f(s):
        return log_b + _log_k_shape(s, p)

    g = bisect_decreasing(f, np.log(t), lo, hi)
    return np.where(t == 1.0, tau, g)
