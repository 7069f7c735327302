"""Outer solve for ``1 < p < 2``: choose ``tau = g(1)`` so that ``H(r) = R``."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, PrecisionError
from .gfield import GParams, _require_open_p, solve_s_circ
from .quadrature import profile_exponent
from .roots import bisect

ENDPOINT_LIMIT = 1e-14


def log_R_of_tau(tau: float, r: float, p: float) -> float:
    s_circ = solve_s_circ(tau, r, p)
    return profile_exponent(s_circ, tau, p)


def R_of_tau(tau: float, r: float, p: float) -> float:
    """Outer radius reached by the profile that starts with ``g(1) = tau``."""
    return math.exp(log_R_of_tau(tau, r, p))


@dataclass(frozen=True)
class TauSolution:
    params: GParams
    r: float
    R: float
    c: float
    R_achieved: float

    @property
    def tau(self) -> float:
        return self.params.tau

    @property
    def p(self) -> float:
        return self.params.p


def _bracket(f, r: float, R: float) -> tuple[float, float]:
    start = 0.5
    f0 = f(start)
    if f0 == 0.0:
        return start, start
    if f0 > 0:
        hi, lo = start, 0.5 * start
        while f(lo) > 0:
            hi, lo = lo, 0.5 * lo
            if lo < ENDPOINT_LIMIT:
                raise PrecisionError(f"tau bracket collapsed onto 0 for r={r!r}, R={R!r}")
        return lo, hi
    lo, hi = start, 0.5 * (start + 1.0)
    while f(hi) < 0:
        lo, hi = hi, 0.5 * (hi + 1.0)
        if 1.0 - hi < ENDPOINT_LIMIT:
            raise PrecisionError(f"tau bracket collapsed onto 1 for r={r!r}, R={R!r}")
    return lo, hi


def solve_tau(r: float, R: float, p: float) -> TauSolution:
    """Shooting parameter for the target annulus ``A(1, R)``.

    The first sign change of ``log R(tau) - log R`` is bracketed and then
    bisected to machine resolution in ``tau``; monotonicity of ``R(tau)`` is
    not assumed.
    """
    _require_open_p(p)
    if not r > 1.0:
        raise DomainError(f"r must exceed 1, got {r!r}")
    if not R > 1.0:
        raise DomainError(f"R must exceed 1, got {R!r}")
    log_target = math.log(R)

    def f(tau: float) -> float:
        return log_R_of_tau(tau, r, p) - log_target

    lo, hi = _bracket(f, r, R)
    tau = lo if lo == hi else bisect(f, lo, hi)
    params = GParams.from_tau(tau, r, p)
    return TauSolution(params=params, r=r, R=R, c=params.c, R_achieved=R_of_tau(tau, r, p))
