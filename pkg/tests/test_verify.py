from __future__ import annotations

import math

import numpy as np
import pytest

from radial_pdirichlet.errors import DomainError, PerturbationError
from radial_pdirichlet.geometry import PolarGridMap, polar_grid, sample_radial
from radial_pdirichlet.verify import (
    PerturbationSpec,
    angular_bound,
    angular_bounds,
    check_koski,
    check_preci,
    perturb_and_compare,
    perturb_sample,
    radial_bound,
    radial_bounds,
    sample_minimizer,
    sweep_points,
    symmetry_suite,
    verify_point,
)

TWO_PI = 2 * math.pi


def test_sweep_grid_feasibility():
    pts = sweep_points()
    assert len(pts) == 42
    p1 = [(r, R) for r, R, p in pts if p == 1.0]
    assert sorted(p1) == [(r, R) for r in (1.5, 2.0, 4.0) for R in (1.5, 2.0)]


def test_concavity_split_examples():
    lhs, rhs, holds = check_koski(1.0, 1.0, 0.5, 1.5)
    assert holds and lhs == pytest.approx(rhs, abs=1e-15)
    lhs, rhs, holds = check_koski(1.0, 0.0, 0.0, 1.5)
    assert holds and lhs == rhs == 1.0
    # 0^0 = 1 at q = 2
    assert check_koski(2.0, 3.0, 0.0, 2.0)[:2] == (5.0, 5.0)


def test_tangent_line_examples():
    for p in (1.0, 1.3, 2.0):
        lhs, rhs, holds = check_preci(1.0, 1.0, p)
        assert holds and lhs == rhs == 1.0
    lhs, rhs, holds = check_preci(2.0, 1.0, 1.5)
    assert lhs == pytest.approx(2**1.5) and rhs == pytest.approx(2.5) and holds


def test_concavity_split_random():
    rng = np.random.default_rng(11)
    n = 100_000
    a, bb = rng.exponential(size=n), rng.exponential(size=n)
    s, q = rng.uniform(size=n), rng.uniform(1, 2, size=n)
    assert check_koski(a, bb, s, q)[2].all()
    # equality exactly on the ratio bb / a = s / (1 - s)
    bb_eq = a * s / (1 - s)
    lhs, rhs, _ = check_koski(a, bb_eq, s, q)
    assert np.all(np.abs(lhs - rhs) <= 1e-10 * lhs)


def test_tangent_line_random():
    rng = np.random.default_rng(12)
    n = 100_000
    a, x, p = rng.exponential(size=n), rng.exponential(size=n) + 1e-3, rng.uniform(1, 2, size=n)
    assert check_preci(a, x, p)[2].all()
    lhs, rhs, _ = check_preci(x, x, p)
    assert np.all(np.abs(lhs - rhs) <= 1e-10 * lhs)


@pytest.fixture(scope="module")
def base(get_minimizer):
    return sample_minimizer(get_minimizer(2.0, 2.0, 1.5), 64, 64)


def test_bounds_exact_on_radial_sample(base):
    assert np.all(np.abs(angular_bounds(base) - TWO_PI) < 1e-10)
    assert np.all(np.abs(radial_bounds(base) - math.log(2.0)) < 1e-8)
    assert angular_bound(base, 10) == pytest.approx(TWO_PI, abs=1e-10)
    assert radial_bound(base, 5) == pytest.approx(math.log(2.0), abs=1e-8)


def test_angular_bound_twisted():
    t, th = polar_grid(1.0, 2.0, 64, 64)
    g = sample_radial(lambda x: x, t, 64)
    tv = th[None, :] + 0.3 * np.sin(th)[None, :] * (t[:, None] - 1)
    twisted = PolarGridMap(t, th, g.rho, tv, 1)
    vals = angular_bounds(twisted)
    assert vals[-1] > TWO_PI + 1e-3
    assert np.all(vals >= TWO_PI - 1e-12)


def test_radial_bound_ripple():
    t, th = polar_grid(1.0, 2.0, 64, 64)
    rho = t[:, None] * np.exp(0.1 * np.sin(math.pi * (t[:, None] - 1)) * np.cos(3 * th[None, :]))
    rippled = PolarGridMap(t, th, rho, np.repeat(th[None, :], 64, axis=0), 1)
    vals = radial_bounds(rippled)
    assert vals.min() >= math.log(2.0) - 1e-12
    assert vals.max() > math.log(2.0) + 1e-3


def test_spec_validation():
    with pytest.raises(DomainError):
        PerturbationSpec(0, 0.1, "diagonal")
    with pytest.raises(DomainError):
        PerturbationSpec(0, -0.1)


@pytest.mark.parametrize("mode", ["radial", "angular", "full"])
def test_perturbation_fixes_boundary(base, mode):
    cand, eps = perturb_sample(base, 2.0, PerturbationSpec(3, 0.08, mode))
    assert eps > 0
    np.testing.assert_allclose(cand.rho[[0, -1]], base.rho[[0, -1]], rtol=1e-14)
    np.testing.assert_allclose(cand.theta_val[[0, -1]], base.theta_val[[0, -1]], atol=1e-14)
    assert not np.allclose(cand.rho, base.rho) or not np.allclose(cand.theta_val, base.theta_val)
    if mode == "radial":
        assert np.ptp(cand.rho - base.rho, axis=1).max() < 1e-12


def test_perturbation_deterministic(base):
    a, _ = perturb_sample(base, 2.0, PerturbationSpec(99, 0.05))
    b, _ = perturb_sample(base, 2.0, PerturbationSpec(99, 0.05))
    np.testing.assert_array_equal(a.rho, b.rho)


def test_large_amplitude_is_halved(base):
    _, eps = perturb_sample(base, 2.0, PerturbationSpec(5, 50.0, "full", 1))
    assert eps < 50.0


def test_retry_exhaustion(base, monkeypatch):
    import radial_pdirichlet.verify as vf

    monkeypatch.setattr(vf, "MAX_RETRIES", 2)
    with pytest.raises(PerturbationError):
        perturb_sample(base, 2.0, PerturbationSpec(5, 1e3, "angular", 1))


def test_zero_amplitude_gap(get_minimizer):
    m = get_minimizer(2.0, 2.0, 1.5)
    rep = perturb_and_compare(m, PerturbationSpec(0, 0.0), (256, 256))
    assert abs(rep.gap) <= 1e-4 * m.energy


@pytest.mark.parametrize("p,mode", [(1.5, "radial"), (1.0, "full")])
def test_perturbation_raises_energy(get_minimizer, p, mode):
    m = get_minimizer(2.0, 2.0, p)
    rep = perturb_and_compare(m, PerturbationSpec(1, 0.05, mode), (256, 256))
    assert rep.gap > 0
    assert rep.lower_bound == m.energy


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
def test_symmetry_suite(get_minimizer, p):
    rep = symmetry_suite(get_minimizer(2.0, 2.0, p))
    assert rep["rotation"] <= 1e-12
    assert rep["inversion"] <= 1e-6
    assert rep["rescaling"] <= 1e-6


def test_verify_point_small():
    rep = verify_point(2.0, 2.0, 1.25, n_trials=12, resolution=(64, 64), seed=3)
    assert rep.passed, rep.failed()
    assert len(rep.trials) == 16
    assert {t.mode for t in rep.trials} == {"rotation", "radial", "angular", "full"}
    again = verify_point(2.0, 2.0, 1.25, n_trials=12, resolution=(64, 64), seed=3)
    assert [t.to_dict() for t in again.trials] == [t.to_dict() for t in rep.trials]


def test_verify_point_injection():
    rep = verify_point(2.0, 2.0, 1.5, n_trials=0, inject="g-offset")
    assert rep.failed() == ["p-constancy"]
    with pytest.raises(DomainError):
        verify_point(2.0, 2.0, 1.5, n_trials=0, inject="bogus")


def test_concavity_split_strict_off_ratio():
    rng = np.random.default_rng(13)
    n = 100_000
    a, s, q = rng.exponential(size=n) + 0.1, rng.uniform(0.05, 0.95, size=n), rng.uniform(1, 1.95, size=n)
    bb = a * s / (1 - s) * rng.choice([0.5, 2.0], size=n)
    lhs, rhs, _ = check_koski(a, bb, s, q)
    assert np.all(lhs - rhs > 1e-10 * lhs)


def test_concavity_split_reproduces_energy_split():
    # a = t^(2/p-2), bb = t^(2/p) l^2, s = g gives the split of the radial integrand
    t, ell, g, p = 1.7, 0.8, 0.4, 1.3
    lhs, rhs, holds = check_koski(t ** (2 / p - 2), t ** (2 / p) * ell**2, g, p)
    assert lhs == pytest.approx(t * (1 / t**2 + ell**2) ** (p / 2), rel=1e-14)
    assert rhs == pytest.approx((1 - g) ** (1 - p / 2) * t ** (1 - p) + g ** (1 - p / 2) * t * ell**p, rel=1e-14)
    assert holds
