"""Bracketed bisection, scalar and vectorized."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import BracketError

MAX_ITER = 2000


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 0.0) -> float:
    """Root of ``f`` on ``[lo, hi]`` by bisection.

    Requires a sign change between the endpoints. Iterates until the bracket is
    narrower than ``xtol`` or cannot be split further in floating point, so
    ``xtol=0`` yields the root to machine resolution.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}")
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_decreasing(
    f: Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    max_iter: int = 200,
) -> np.ndarray:
    """Solve ``f(x) = target`` elementwise for a strictly decreasing ``f``.

    ``lo`` and ``hi`` must bracket every solution, i.e. ``f(lo) >= target >= f(hi)``.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    target = np.asarray(target, dtype=float)
    lo, hi, target = np.broadcast_arrays(lo, hi, target)
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        above = f(mid) > target
        lo = np.where(active & above, mid, lo)
        hi = np.where(active & ~above, mid, hi)
    return 0.5 * (lo + hi)
