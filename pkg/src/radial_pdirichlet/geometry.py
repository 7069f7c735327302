"""Annulus normalization, sampled polar maps and the two exact symmetries.

A map ``h`` of the annulus ``1 <= |z| <= r`` is stored in polar form
``h(t e^{i theta}) = rho(t, theta) exp(i Theta(t, theta))`` on a tensor grid,
with ``Theta`` unwrapped so that ``Theta(t, theta + 2 pi) = Theta(t, theta) +
2 pi * winding``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, ExtrapolationError, SingularityError

TWO_PI = 2.0 * math.pi
BOUNDARY_TOL = 1e-9

REGIME_P1 = "closed-form-p1"
REGIME_SHOOTING = "shooting"
REGIME_P2 = "power-p2"


def regime_of(p: float) -> str:
    """Regime tag of an exponent in ``[1, 2]``."""
    if not (1.0 <= p <= 2.0) or math.isnan(p):
        raise DomainError(f"exponent p must lie in [1, 2], got {p!r}")
    if p == 1.0:
        return REGIME_P1
    if p == 2.0:
        return REGIME_P2
    return REGIME_SHOOTING


@dataclass(frozen=True)
class AnnulusPair:
    """Normalized domain annulus A(1, r) and target annulus A(1, R)."""

    r: float
    R: float

    def __post_init__(self):
        if not (self.r > 1.0):
            raise DomainError(f"domain outer radius must exceed 1, got r={self.r!r}")
        if not (self.R > 1.0):
            raise DomainError(f"target outer radius must exceed 1, got R={self.R!r}")

    @property
    def domain_modulus(self) -> float:
        return math.log(self.r)

    @property
    def target_modulus(self) -> float:
        return math.log(self.R)


def normalize_annuli(r0: float, R0: float, r0s: float, R0s: float) -> AnnulusPair:
    """Reduce ``A(r0, R0) -> A(r0s, R0s)`` to ``A(1, R0/r0) -> A(1, R0s/r0s)``."""
    if not (0.0 < r0 < R0):
        raise DomainError(f"domain radii must satisfy 0 < r0 < R0, got ({r0!r}, {R0!r})")
    if not (0.0 < r0s < R0s):
        raise DomainError(f"target radii must satisfy 0 < r0s < R0s, got ({r0s!r}, {R0s!r})")
    return AnnulusPair(R0 / r0, R0s / r0s)


@dataclass(frozen=True)
class PolarGridMap:
    """Samples of a planar map on a polar tensor grid.

    ``rho`` and ``theta_val`` have shape ``(len(t_grid), len(theta_grid))``.
    ``theta_grid`` must be the uniform grid ``2 pi j / n``. ``winding`` is
    inferred from the samples when omitted.
    """

    t_grid: np.ndarray
    theta_grid: np.ndarray
    rho: np.ndarray
    theta_val: np.ndarray
    winding: int | None = field(default=None)

    def __post_init__(self):
        # private copies, frozen below
        t = np.array(self.t_grid, dtype=float)
        th = np.array(self.theta_grid, dtype=float)
        rho = np.array(self.rho, dtype=float)
        tv = np.array(self.theta_val, dtype=float)
        if t.ndim != 1 or t.size < 3 or np.any(np.diff(t) <= 0):
            raise DomainError("t_grid must be strictly increasing with at least 3 nodes")
        if th.ndim != 1 or th.size < 3:
            raise DomainError("theta_grid needs at least 3 nodes")
        n = th.size
        if np.max(np.abs(th - TWO_PI * np.arange(n) / n)) > 1e-12:
            raise DomainError("theta_grid must be uniform on [0, 2 pi)")
        if rho.shape != (t.size, n) or tv.shape != (t.size, n):
            raise DomainError(f"rho/theta_val must have shape {(t.size, n)}")
        for name, arr in (("t_grid", t), ("theta_grid", th), ("rho", rho), ("theta_val", tv)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        w = self.winding
        if w is None:
            span = tv[:, -1] - tv[:, 0]
            w = int(np.round(np.median(span) / (TWO_PI * (n - 1) / n)))
        if w not in (1, -1):
            raise DomainError(f"winding must be +1 or -1, got {w!r}")
        object.__setattr__(self, "winding", w)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rho.shape

    @property
    def dtheta(self) -> float:
        return TWO_PI / self.theta_grid.size

    def in_target(self, R: float, eps: float = BOUNDARY_TOL) -> bool:
        """True when every sample of ``rho`` lies in ``[1 - eps, R (1 + eps)]``."""
        return bool(np.all(self.rho >= 1.0 - eps) and np.all(self.rho <= R * (1.0 + eps)))

    def rotated(self, alpha: float) -> "PolarGridMap":
        """Samples of ``e^{i alpha} h``."""
        return PolarGridMap(self.t_grid, self.theta_grid, self.rho, self.theta_val + alpha, self.winding)

    # CSV layout: header t,theta,rho,Theta; rows ordered t-major.
    def to_csv(self, path: str | Path) -> None:
        nt, nth = self.shape
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "theta", "rho", "Theta"])
            for i in range(nt):
                for j in range(nth):
                    w.writerow(
                        [
                            f"{self.t_grid[i]:.17g}",
                            f"{self.theta_grid[j]:.17g}",
                            f"{self.rho[i, j]:.17g}",
                            f"{self.theta_val[i, j]:.17g}",
                        ]
                    )

    @classmethod
    def from_csv(cls, path: str | Path) -> "PolarGridMap":
        data = np.genfromtxt(path, delimiter=",", names=True)
        try:
            t_all, th_all = data["t"], data["theta"]
            rho_all, tv_all = data["rho"], data["Theta"]
        except ValueError as exc:
            raise DomainError(f"{path}: expected header t,theta,rho,Theta") from exc
        t = np.unique(t_all)
        nt = t.size
        if t_all.size % nt:
            raise DomainError(f"{path}: rows do not form a tensor grid")
        nth = t_all.size // nt
        shape = (nt, nth)
        return cls(
            t_all.reshape(shape)[:, 0],
            th_all.reshape(shape)[0],
            rho_all.reshape(shape),
            tv_all.reshape(shape),
        )


def polar_grid(t_min: float, t_max: float, nt: int, ntheta: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform radial grid and the standard angular grid."""
    return np.linspace(t_min, t_max, nt), TWO_PI * np.arange(ntheta) / ntheta


def sample_radial(profile, t_grid: np.ndarray, ntheta: int) -> PolarGridMap:
    """Samples of ``H(t) e^{i theta}``; ``profile`` maps an array of ``t`` to ``H``."""
    t_grid = np.asarray(t_grid, dtype=float)
    theta = TWO_PI * np.arange(ntheta) / ntheta
    H = np.asarray(profile(t_grid), dtype=float)
    rho = np.repeat(H[:, None], ntheta, axis=1)
    tv = np.repeat(theta[None, :], t_grid.size, axis=0)
    return PolarGridMap(t_grid, theta, rho, tv, 1)


def invert_map(m: PolarGridMap) -> PolarGridMap:
    """Samples of ``1/h``: ``rho -> 1/rho``, ``Theta -> -Theta``.

    The image becomes ``A(1/R, 1)`` and the winding flips; rescaling the target
    by ``1/R`` renormalizes it.
    """
    if np.any(m.rho <= 0):
        raise SingularityError("cannot invert a map with rho <= 0 samples")
    return PolarGridMap(m.t_grid, m.theta_grid, 1.0 / m.rho, -m.theta_val, -m.winding)


def _trig_resample(values: np.ndarray, n_new: int) -> np.ndarray:
    """Trigonometric interpolation of periodic rows onto ``n_new`` uniform nodes."""
    n = values.shape[-1]
    coef = np.fft.rfft(values, axis=-1) / n
    theta = TWO_PI * np.arange(n_new) / n_new
    k = np.arange(coef.shape[-1])
    basis = np.exp(1j * np.outer(k, theta))
    weight = np.full(k.size, 2.0)
    weight[0] = 1.0
    if n % 2 == 0:
        weight[-1] = 1.0  # Nyquist term: cos only
    return np.real((coef * weight) @ basis)


def rescale_map(
    m: PolarGridMap,
    lambda_dom: float,
    lambda_tgt: float,
    t_grid: np.ndarray | None = None,
    ntheta: int | None = None,
) -> PolarGridMap:
    """Samples of ``z -> h(lambda_dom z) / lambda_tgt``.

    Without ``t_grid``/``ntheta`` the samples are carried exactly onto the grid
    ``t / lambda_dom``. Otherwise the map is resampled onto the requested grid
    (monotone cubic in ``t``, trigonometric in ``theta``).
    """
    if not (lambda_dom > 0 and lambda_tgt > 0):
        raise DomainError("scale factors must be positive")
    t_new_native = m.t_grid / lambda_dom
    rho = m.rho / lambda_tgt
    tv = m.theta_val
    if t_grid is None and ntheta is None:
        return PolarGridMap(t_new_native, m.theta_grid, rho, tv, m.winding)

    nth = m.theta_grid.size if ntheta is None else int(ntheta)
    t_req = t_new_native if t_grid is None else np.asarray(t_grid, dtype=float)
    lo, hi = t_new_native[0], t_new_native[-1]
    slack = 1e-12 * max(1.0, hi)
    if t_req[0] < lo - slack or t_req[-1] > hi + slack:
        raise ExtrapolationError(
            f"requested t range [{t_req[0]!r}, {t_req[-1]!r}] leaves [{lo!r}, {hi!r}]"
        )
    t_req = np.clip(t_req, lo, hi)
    theta_old = m.theta_grid
    periodic = tv - m.winding * theta_old[None, :]
    if nth != theta_old.size:
        rho = _trig_resample(rho, nth)
        periodic = _trig_resample(periodic, nth)
    theta_new = TWO_PI * np.arange(nth) / nth
    rho = PchipInterpolator(t_new_native, rho, axis=0)(t_req)
    periodic = PchipInterpolator(t_new_native, periodic, axis=0)(t_req)
    return PolarGridMap(t_req, theta_new, rho, periodic + m.winding * theta_new[None, :], m.winding)
