from __future__ import annotations

import math

import numpy as np
import pytest

from radial_pdirichlet.energy import grid_energy
from radial_pdirichlet.errors import DomainError, ExtrapolationError, SingularityError
from radial_pdirichlet.geometry import (
    AnnulusPair,
    PolarGridMap,
    invert_map,
    normalize_annuli,
    polar_grid,
    regime_of,
    rescale_map,
    sample_radial,
)


@pytest.mark.parametrize(
    "radii,expected",
    [((1, 2, 1, 3), (2, 3)), ((2, 6, 5, 10), (3, 2)), ((0.5, 1, 0.25, 1), (2, 4))],
)
def test_normalize(radii, expected):
    pair = normalize_annuli(*radii)
    assert (pair.r, pair.R) == pytest.approx(expected, rel=1e-15)


def test_normalize_rejects():
    with pytest.raises(DomainError):
        normalize_annuli(2, 1, 1, 2)
    with pytest.raises(DomainError):
        normalize_annuli(1, 2, 0, 2)
    with pytest.raises(DomainError):
        AnnulusPair(1.0, 2.0)


def test_moduli():
    pair = AnnulusPair(math.e, math.e**2)
    assert pair.domain_modulus == pytest.approx(1.0)
    assert pair.target_modulus == pytest.approx(2.0)


def test_regime_of():
    assert regime_of(1.0) != regime_of(1.5) != regime_of(2.0)
    with pytest.raises(DomainError):
        regime_of(0.99)


def identity(r=2.0, n=32):
    t, _ = polar_grid(1.0, r, n, n)
    return sample_radial(lambda x: x, t, n)


def smooth_map(n=48):
    g = identity(2.0, n)
    t = g.t_grid[:, None]
    th = g.theta_grid[None, :]
    rho = t ** 1.3 * np.exp(0.05 * (t - 1) * (2 - t) * np.cos(2 * th))
    tv = th + 0.1 * (t - 1) * (2 - t) * np.sin(th)
    return PolarGridMap(g.t_grid, g.theta_grid, rho, tv, 1)


def test_invert_identity_gives_reciprocal():
    g = identity()
    inv = invert_map(g)
    z = g.t_grid[:, None] * np.exp(1j * g.theta_grid[None, :])
    w = inv.rho * np.exp(1j * inv.theta_val)
    np.testing.assert_allclose(w, 1 / z, rtol=1e-14)
    assert inv.winding == -1


def test_invert_is_involution():
    m = smooth_map()
    twice = invert_map(invert_map(m))
    assert np.max(np.abs(twice.rho - m.rho)) <= 1e-14 * np.max(m.rho)
    np.testing.assert_array_equal(twice.theta_val, m.theta_val)
    assert twice.winding == m.winding


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
def test_invert_preserves_energy(p):
    m = smooth_map()
    assert grid_energy(invert_map(m), p) == pytest.approx(grid_energy(m, p), rel=1e-12)


def test_invert_rejects_nonpositive():
    g = identity(n=16)
    rho = np.array(g.rho)
    rho[0, 0] = 0.0
    with pytest.raises(SingularityError):
        invert_map(PolarGridMap(g.t_grid, g.theta_grid, rho, g.theta_val, 1))


def test_rescale_unit_is_identity():
    m = smooth_map()
    s = rescale_map(m, 1.0, 1.0)
    np.testing.assert_array_equal(s.rho, m.rho)
    np.testing.assert_array_equal(s.t_grid, m.t_grid)


def test_rescale_identity_stays_identity():
    s = rescale_map(identity(), 2.0, 2.0)
    np.testing.assert_allclose(s.rho, np.repeat(s.t_grid[:, None], s.shape[1], axis=1), rtol=1e-15)
    assert s.t_grid[0] == 0.5 and s.t_grid[-1] == 1.0


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
def test_rescale_energy_law(p):
    m = smooth_map()
    lam = 2.0
    ratio = grid_energy(rescale_map(m, lam, 3.0), p) / grid_energy(m, p)
    assert ratio == pytest.approx(lam ** (p - 2), rel=1e-12)


def test_rescale_resampled_grid():
    m = smooth_map(64)
    lam = 1.5
    t_new = np.linspace(1 / lam, 2 / lam, 50)
    s = rescale_map(m, lam, 1.0, t_grid=t_new, ntheta=80)
    assert s.shape == (50, 80)
    t = t_new[:, None] * lam
    th = s.theta_grid[None, :]
    exact = t ** 1.3 * np.exp(0.05 * (t - 1) * (2 - t) * np.cos(2 * th))
    assert np.max(np.abs(s.rho - exact)) < 1e-5
    assert np.max(np.abs(s.theta_val - (th + 0.1 * (t - 1) * (2 - t) * np.sin(th)))) < 1e-5


def test_rescale_rejects():
    m = smooth_map()
    with pytest.raises(DomainError):
        rescale_map(m, 0.0, 1.0)
    with pytest.raises(ExtrapolationError):
        rescale_map(m, 1.0, 1.0, t_grid=np.linspace(0.9, 2.0, 10))


def test_csv_round_trip(tmp_path):
    m = smooth_map(20)
    path = tmp_path / "map.csv"
    m.to_csv(path)
    assert path.read_text().splitlines()[0] == "t,theta,rho,Theta"
    back = PolarGridMap.from_csv(path)
    for name in ("t_grid", "theta_grid", "rho", "theta_val"):
        np.testing.assert_array_equal(getattr(back, name), getattr(m, name))
    assert back.winding == 1


def test_grid_validation():
    g = identity(n=16)
    with pytest.raises(DomainError):
        PolarGridMap(g.t_grid[::-1], g.theta_grid, g.rho, g.theta_val)
    with pytest.raises(DomainError):
        PolarGridMap(g.t_grid, g.theta_grid * 1.01, g.rho, g.theta_val)
    with pytest.raises(DomainError):
        PolarGridMap(g.t_grid, g.theta_grid, g.rho[:-1], g.theta_val)
    with pytest.raises(DomainError):
        PolarGridMap(g.t_grid, g.theta_grid, g.rho, 2 * g.theta_val)


def test_grid_is_immutable_and_copied():
    rho = np.ones((16, 16))
    g = identity(n=16)
    m = PolarGridMap(g.t_grid, g.theta_grid, rho, g.theta_val)
    rho[0, 0] = 5.0
    assert m.rho[0, 0] == 1.0
    with pytest.raises(ValueError):
        m.rho[0, 0] = 2.0


def test_in_target():
    g = identity(2.0, 16)
    assert g.in_target(2.0)
    assert not g.in_target(1.5)
