"""Certification harness for the radial minimizer.

Checks the scalar inequalities behind the lower bound, the two integral
bounds on ``Theta`` and ``log rho`` used for non-radial maps, the symmetries
of the energy, and minimality against seeded boundary-preserving
perturbations of the sampled minimizer.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from .energy import (
    EnergyReport,
    energy_from_gradients,
    el_residual,
    grid_energy,
    lower_bound,
    p_profile,
    _periodic_diff,
    polar_gradients,
)
from .errors import DomainError, PerturbationError
from .geometry import TWO_PI, PolarGridMap, invert_map, polar_grid, rescale_map, sample_radial
from .minimizer import RadialMinimizer, build_minimizer, p1_modulus_bound

SWEEP_R = (1.5, 2.0, 4.0)
SWEEP_TARGET = (1.5, 2.0, 4.0)
SWEEP_P = (1.0, 1.25, 1.5, 1.75, 2.0)

INEQ_TOL = 1e-14
MODES = ("radial", "angular", "full")
MAX_RETRIES = 100

# invariant thresholds
TOL_BOUNDARY = 1e-8
TOL_P_CONST = 1e-7
TOL_EL = 1e-6
TOL_LOWER_BOUND = 1e-6
TOL_MINIMALITY = 1e-4
TOL_INTEGRAL_BOUND = 1e-3
TOL_SYMMETRY = 1e-6
TOL_EQUALITY = 1e-6


def sweep_points() -> list[tuple[float, float, float]]:
    """The (r, R, p) sweep grid; p = 1 points above the existence threshold are dropped."""
    pts = []
    for r, R, p in product(SWEEP_R, SWEEP_TARGET, SWEEP_P):
        if p == 1.0 and math.log(R) > p1_modulus_bound(r):
            continue
        pts.append((r, R, p))
    return pts


# -- scalar inequalities ---------------------------------------------------


def check_koski(a, bb, s, q):
    """``(a + bb)^(q/2) >= (1-s)^(1-q/2) a^(q/2) + s^(1-q/2) bb^(q/2)``.

    Concavity of ``x^(q/2)``; equality iff ``bb / a = s / (1 - s)``. This
    weight pairing is the one used by the energy lower bound (``a`` carries
    the angular term, ``s = g``). Vectorized; ``0^0 = 1`` at ``q = 2``.
    Returns ``(lhs, rhs, holds)``.
    """
    a, bb, s, q = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, bb, s, q)))
    lhs = (a + bb) ** (q / 2)
    rhs = (1 - s) ** (1 - q / 2) * a ** (q / 2) + s ** (1 - q / 2) * bb ** (q / 2)
    holds = lhs >= rhs - INEQ_TOL
    if lhs.ndim == 0:
        return float(lhs), float(rhs), bool(holds)
    return lhs, rhs, holds


def check_preci(a, x, p):
    """Tangent-line inequality ``a^p >= p x^(p-1) a - (p-1) x^p``; equality iff ``a = x``."""
    a, x, p = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, x, p)))
    lhs = a**p
    rhs = p * x ** (p - 1) * a - (p - 1) * x**p
    holds = lhs >= rhs - INEQ_TOL
    if lhs.ndim == 0:
        return float(lhs), float(rhs), bool(holds)
    return lhs, rhs, holds


# -- integral bounds for the angle and the log-modulus ----------------------
#
# Both use a staggered rule: differences between neighbouring samples along the
# integration path, the transverse derivative averaged onto the midpoint. The
# path-length sum then dominates the total increment exactly, as in the
# continuous argument.


def _angular_sums(tv, th_t, t_grid, dtheta, winding) -> np.ndarray:
    step = np.empty_like(tv)
    step[:, :-1] = tv[:, 1:] - tv[:, :-1]
    step[:, -1] = tv[:, 0] + TWO_PI * winding - tv[:, -1]
    th_t_mid = 0.5 * (th_t + np.roll(th_t, -1, axis=1))
    radial_part = t_grid[:, None] * th_t_mid * dtheta
    return np.sqrt(step * step + radial_part * radial_part).sum(axis=1)


def _radial_sums(lr, lr_th, t_grid) -> np.ndarray:
    step = np.diff(lr, axis=0)
    dt = np.diff(t_grid)[:, None]
    t_mid = 0.5 * (t_grid[1:] + t_grid[:-1])[:, None]
    ang_mid = 0.5 * (lr_th[1:] + lr_th[:-1]) / t_mid * dt
    return np.sqrt(step * step + ang_mid * ang_mid).sum(axis=0)


def angular_bounds(m: PolarGridMap, grads=None) -> np.ndarray:
    """``int_{|z|=t} |grad Theta| |dz|`` for every radius of the grid."""
    if grads is None:
        grads = polar_gradients(m)
    return _angular_sums(m.theta_val, grads[2], m.t_grid, m.dtheta, m.winding)


def angular_bound(m: PolarGridMap, t_index: int) -> float:
    return float(angular_bounds(m)[t_index])


def radial_bounds(m: PolarGridMap, grads=None) -> np.ndarray:
    """``int_1^r |grad rho| / rho dt`` along every ray of the grid."""
    if grads is None:
        grads = polar_gradients(m)
    return _radial_sums(np.log(m.rho), grads[1], m.t_grid)


def radial_bound(m: PolarGridMap, theta_index: int) -> float:
    return float(radial_bounds(m)[theta_index])


# -- perturbations ---------------------------------------------------------


@dataclass(frozen=True)
class PerturbationSpec:
    """Seeded Fourier perturbation of a sampled radial map.

    ``mode`` selects which polar component is perturbed: ``radial`` (log rho,
    angle-independent), ``angular`` (Theta only) or ``full`` (both, with
    angular frequencies).
    """

    seed: int
    amplitude: float
    mode: str = "full"
    n_modes: int = 3

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.amplitude >= 0:
            raise DomainError(f"amplitude must be nonnegative, got {self.amplitude!r}")
        if self.n_modes < 1:
            raise DomainError("n_modes must be at least 1")


def sample_minimizer(m: RadialMinimizer, nt: int, ntheta: int) -> PolarGridMap:
    """``h(t e^{i theta}) = H(t) e^{i theta}`` on a uniform polar grid, ``H`` without interpolation."""
    t, _ = polar_grid(1.0, m.r, nt, ntheta)
    return sample_radial(m.H_exact, t, ntheta)


@dataclass(frozen=True)
class _Fields:
    """``log rho`` and ``Theta`` samples with their polar gradients."""

    lr: np.ndarray
    tv: np.ndarray
    grads: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    @classmethod
    def of_map(cls, m: PolarGridMap) -> _Fields:
        return cls(np.log(m.rho), m.theta_val, polar_gradients(m))

    def shifted(self, other: _Fields, eps: float) -> _Fields:
        # the difference stencils are linear, so gradients add
        return _Fields(
            self.lr + eps * other.lr,
            self.tv + eps * other.tv,
            tuple(g + eps * h for g, h in zip(self.grads, other.grads)),
        )


def _shape_fields(spec: PerturbationSpec, t: np.ndarray, theta: np.ndarray, r: float) -> _Fields:
    """Unit-amplitude perturbation of ``(log rho, Theta)`` and its gradients.

    Every mode is a product ``f(t) u(theta)``, so the stencils are applied
    to the 1D factors.
    """
    rng = np.random.default_rng(spec.seed)
    x = (t - 1.0) / (r - 1.0)
    dtheta = float(theta[1] - theta[0])
    shape = (t.size, theta.size)
    lr, lr_t, lr_th = np.zeros(shape), np.zeros(shape), np.zeros(shape)
    tv, tv_t, tv_th = np.zeros(shape), np.zeros(shape), np.zeros(shape)

    def add(val, d_t, d_th, f, u):
        f_t = np.gradient(f, t, edge_order=2)
        u_th = _periodic_diff(u[None, :], 0.0, dtheta)[0]
        val += np.outer(f, u)
        d_t += np.outer(f_t, u)
        d_th += np.outer(f, u_th)

    for _ in range(spec.n_modes):
        k = 0 if spec.mode == "radial" else int(rng.integers(0, 5))
        phase = 0.0 if spec.mode == "radial" else float(rng.uniform(0, TWO_PI))
        m_rho, m_th = (int(v) for v in rng.integers(1, 4, size=2))
        a_rho, a_th = rng.uniform(0.5, 1.0, size=2) * rng.choice([-1.0, 1.0], size=2) / spec.n_modes
        if spec.mode in ("radial", "full"):
            add(lr, lr_t, lr_th, a_rho * np.sin(m_rho * math.pi * x), np.cos(k * theta + phase))
        if spec.mode in ("angular", "full"):
            add(tv, tv_t, tv_th, a_th * np.sin(m_th * math.pi * x), np.sin(k * theta + phase))
    return _Fields(lr, tv, (lr_t, lr_th, tv_t, tv_th))


def _admissible(f: _Fields) -> bool:
    """Sampled homeomorphism test: monotone rays, monotone circles, positive polar Jacobian."""
    if not (np.all(np.isfinite(f.lr)) and np.all(np.isfinite(f.tv))):
        return False
    if np.any(np.diff(f.lr, axis=0) <= 0):
        return False
    tv = f.tv
    if np.any(np.diff(tv, axis=1) <= 0) or np.any(tv[:, 0] + TWO_PI - tv[:, -1] <= 0):
        return False
    lr_t, lr_th, th_t, th_th = f.grads
    return bool(np.all(lr_t * th_th - lr_th * th_t > 0))


def _perturb(base: _Fields, t, theta, r: float, spec: PerturbationSpec) -> tuple[_Fields, float]:
    delta = _shape_fields(spec, t, theta, r)
    eps = spec.amplitude
    for _ in range(MAX_RETRIES):
        cand = base.shifted(delta, eps)
        if _admissible(cand):
            return cand, eps
        eps *= 0.5
    raise PerturbationError(f"no admissible perturbation for seed {spec.seed} after {MAX_RETRIES} retries")


def perturb_sample(base: PolarGridMap, r: float, spec: PerturbationSpec) -> tuple[PolarGridMap, float]:
    """Perturbed copy of ``base`` and the amplitude actually used.

    Boundary circles are left fixed. Inadmissible draws are retried with
    halved amplitude, at most ``MAX_RETRIES`` times.
    """
    cand, eps = _perturb(_Fields.of_map(base), base.t_grid, base.theta_grid, r, spec)
    return PolarGridMap(base.t_grid, base.theta_grid, np.exp(cand.lr), cand.tv, 1), eps


def perturb_and_compare(
    m: RadialMinimizer, spec: PerturbationSpec, resolution: tuple[int, int] = (512, 512)
) -> EnergyReport:
    """Grid energy of a perturbed minimizer against the minimal energy.

    ``lower_bound`` in the report is the radial energy of ``m``; ``gap`` is
    the excess of the perturbed map over it.
    """
    base = sample_minimizer(m, *resolution)
    cand, _ = _perturb(_Fields.of_map(base), base.t_grid, base.theta_grid, m.r, spec)
    energy = energy_from_gradients(cand.grads, base.t_grid, base.dtheta, m.p)
    e0 = m.energy
    return EnergyReport(
        energy=energy,
        lower_bound=e0,
        gap=energy - e0,
        p_const_dev=p_profile(m).max_dev,
        el_residual=el_residual(m),
        nt=resolution[0],
        ntheta=resolution[1],
    )


# -- symmetries --------------------------------------------------------------


def symmetry_suite(m: RadialMinimizer, resolution: tuple[int, int] = (128, 128), alpha: float = 1.0,
                   lam: float = 2.0) -> dict:
    """Relative violations of inversion, rescaling and rotation invariance."""
    base = sample_minimizer(m, *resolution)
    e0 = grid_energy(base, m.p)
    e_inv = grid_energy(invert_map(base), m.p)
    e_rot = grid_energy(base.rotated(alpha), m.p)
    e_scaled = grid_energy(rescale_map(base, lam, lam), m.p)
    out = {
        "inversion": abs(e_inv - e0) / e0,
        "rescaling": abs(e_scaled / e0 - lam ** (m.p - 2)) / lam ** (m.p - 2),
        "rotation": abs(e_rot - e0) / e0,
    }
    out["max"] = max(out.values())
    return out


# -- invariant suite -------------------------------------------------------


@dataclass
class Trial:
    seed: int
    mode: str
    amplitude: float
    energy: float
    gap: float
    grid_gap: float
    angular_min: float
    radial_min: float

    def to_dict(self) -> dict:
        return {"seed": self.seed, "mode": self.mode, "amplitude": self.amplitude,
                "energy": self.energy, "gap": self.gap}


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool


@dataclass
class PointReport:
    r: float
    R: float
    p: float
    checks: list[Check] = field(default_factory=list)
    trials: list[Trial] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "R": self.R,
            "p": self.p,
            "passed": self.passed,
            "checks": [{"name": c.name, "value": c.value, "limit": c.limit, "passed": c.passed}
                       for c in self.checks],
        }


def _trial_seeds(seed: int, n: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)]


def run_trials(m: RadialMinimizer, n_trials: int, resolution: tuple[int, int], seed: int,
               n_rotations: int = 4) -> list[Trial]:
    """``n_trials`` seeded perturbations plus ``n_rotations`` pure rotations (the equality cases)."""
    base = sample_minimizer(m, *resolution)
    t, theta, dtheta = base.t_grid, base.theta_grid, base.dtheta
    base_f = _Fields.of_map(base)
    e_star = m.energy
    e_grid = energy_from_gradients(base_f.grads, t, dtheta, m.p)
    trials = []
    for i, s in enumerate(_trial_seeds(seed, n_rotations + n_trials)):
        rng = np.random.default_rng(s)
        if i < n_rotations:
            cand = _Fields.of_map(base.rotated(float(rng.uniform(0, TWO_PI))))
            mode, amp = "rotation", 0.0
        else:
            spec = PerturbationSpec(
                seed=s,
                amplitude=float(rng.uniform(0.02, 0.1)),
                mode=MODES[i % len(MODES)],
                n_modes=int(rng.integers(1, 4)),
            )
            cand, amp = _perturb(base_f, t, theta, m.r, spec)
            mode = spec.mode
        energy = energy_from_gradients(cand.grads, t, dtheta, m.p)
        trials.append(
            Trial(
                seed=s,
                mode=mode,
                amplitude=amp,
                energy=energy,
                gap=(energy - e_star) / e_star,
                grid_gap=(energy - e_grid) / e_grid,
                angular_min=float(_angular_sums(cand.tv, cand.grads[2], t, dtheta, 1).min()),
                radial_min=float(_radial_sums(cand.lr, cand.grads[1], t).min()),
            )
        )
    return trials


def verify_point(
    r: float,
    R: float,
    p: float,
    n_trials: int = 200,
    resolution: tuple[int, int] = (512, 512),
    seed: int = 0,
    nodes: int = 1000,
    inject: str | None = None,
) -> PointReport:
    """Run every invariant at one parameter point.

    ``inject='g-offset'`` shifts the tabulated ``g`` by 0.01, a negative
    control that must trip ``p-constancy``.
    """
    m = build_minimizer(r, R, p, nodes)
    if inject == "g-offset":
        m = replace(m, g_table=m.g_table + 0.01)
    elif inject is not None:
        raise DomainError(f"unknown injection {inject!r}")
    rep = PointReport(r, R, p)

    def add(name: str, value: float, limit: float, ok: bool) -> None:
        rep.checks.append(Check(name, float(value), float(limit), bool(ok)))

    bnd = max(abs(m.H_table[0] - 1.0), abs(m.H_table[-1] - R))
    add("boundary", bnd, TOL_BOUNDARY, bnd <= TOL_BOUNDARY)
    dev = p_profile(m).max_dev
    add("p-constancy", dev, TOL_P_CONST, dev <= TOL_P_CONST)
    el = el_residual(m)
    add("el-residual", el, TOL_EL, el <= TOL_EL)
    e_star = m.energy
    lb = abs(e_star - lower_bound(m)) / e_star
    add("lower-bound", lb, TOL_LOWER_BOUND, lb <= TOL_LOWER_BOUND)
    sym = symmetry_suite(m)["max"]
    add("symmetry", sym, TOL_SYMMETRY, sym <= TOL_SYMMETRY)

    if n_trials > 0:
        trials = run_trials(m, n_trials, resolution, seed)
        rep.trials = trials
        worst = min(t.gap for t in trials)
        add("minimality", worst, -TOL_MINIMALITY, worst >= -TOL_MINIMALITY)
        ang = min(t.angular_min for t in trials)
        add("angle-bound", ang, TWO_PI - TOL_INTEGRAL_BOUND, ang >= TWO_PI - TOL_INTEGRAL_BOUND)
        rad = min(t.radial_min for t in trials)
        add("radius-bound", rad, math.log(R) - TOL_INTEGRAL_BOUND, rad >= math.log(R) - TOL_INTEGRAL_BOUND)
        tight = [t for t in trials if t.grid_gap < TOL_EQUALITY]
        stray = sum(t.mode != "rotation" for t in tight)
        add("equality-rotations-only", stray, 0, stray == 0)
    return rep


def _verify_star(args):
    return verify_point(*args[:3], **args[3])


def verify_sweep(points=None, jobs: int | None = None, **kwargs) -> list[PointReport]:
    """:func:`verify_point` over ``points`` (default: the sweep grid), optionally in parallel."""
    points = sweep_points() if points is None else list(points)
    jobs = jobs or os.cpu_count() or 1
    work = [(r, R, p, kwargs) for r, R, p in points]
    if jobs == 1 or len(work) == 1:
        return [_verify_star(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_verify_star, work))
