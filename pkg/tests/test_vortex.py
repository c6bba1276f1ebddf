import dataclasses
import math

import numpy as np
import pytest

from vortexlab.config import SolverParams, ZeroConfig
from vortexlab.diagnostics import (annulus_check, annulus_energy, decay_exponent, decay_slope,
                                   local_degrees, residual_report, winding_degrees)
from vortexlab.errors import (AmbiguousZero, DomainTooSmall, InsufficientRange, ResolutionFailure,
                              ValidationError)
from vortexlab.grid import Grid
from vortexlab.radial import radial_profile
from vortexlab.vortex import default_params, default_radius, rim_modulus, solve_vortex

N = 512


def test_vacuum():
    sol = solve_vortex(ZeroConfig(), SolverParams(grid_points_per_axis=64))
    assert sol.energy == 0.0
    assert np.all(sol.f == 1) and np.all(sol.phi == 0) and np.all(sol.psi == 0)
    assert residual_report(sol) == (0.0, 0.0)
    assert annulus_energy(sol, 1.0, 5.0) == 0.0
    with pytest.raises(InsufficientRange):
        decay_exponent(sol, (4.0, 9.0))


def test_resolution_failure():
    cfg = ZeroConfig(((0j, 4),))
    with pytest.raises(ResolutionFailure):
        solve_vortex(cfg, default_params(cfg, grid_points_per_axis=64))


def test_domain_too_small():
    with pytest.raises(DomainTooSmall):
        solve_vortex(ZeroConfig(((5 + 0j, 1),)), SolverParams(domain_radius=12, grid_points_per_axis=128))


def test_default_radius_keeps_rim_close_to_one():
    for cfg in (ZeroConfig(((0j, 1),)), ZeroConfig(((0j, 4),)), ZeroConfig(((-2 - 1j, 1), (3 + 4j, 2)))):
        R = default_radius(cfg)
        assert R >= max(12, 8 + cfg.max_abs())
        assert rim_modulus(cfg, R) >= 0.992


def test_single_vortex(solve):
    sol = solve(((0j, 1),), N)
    assert sol.energy / math.pi == pytest.approx(1.0, abs=0.02)
    r1, r2 = residual_report(sol)
    assert max(r1, r2) <= 1e-4
    mod = np.abs(sol.f[sol.disk()])
    assert mod.max() < 1 and mod.min() < 0.05
    assert sol.newton_iterations <= 10
    with pytest.raises(ValueError):
        sol.f[0, 0] = 0


def test_energy_exhaustion(solve):
    sol = solve(((0j, 1),), N)
    assert annulus_energy(sol, 0.0, sol.grid.radius) == pytest.approx(sol.energy, rel=1e-3)


def test_radial_oracle(solve):
    sol = solve(((0j, 4),), N)
    R = sol.grid.radius
    prof = radial_profile(4, r_max=R / 2)
    r = np.linspace(1.0, R / 2, 40)
    h2d = sol.sample("h", r + 0j)
    assert np.max(np.abs(h2d - prof(r))) <= 1e-3
    assert sol.energy / math.pi == pytest.approx(4.0, abs=0.08)


def test_radial_oracle_single_vortex_slope():
    prof = radial_profile(1)
    # |f|^2 ~ e^a r^2 near the core
    assert prof.a == pytest.approx(-1.0107, abs=2e-3)


def test_translation_equivariance(solve):
    a = solve(((0j, 1),), 384, 12.0)
    b = solve(((1 + 0.5j, 1),), 384, 12.0)
    pts = (np.random.default_rng(0).uniform(-4, 4, 200) + 1j * np.random.default_rng(1).uniform(-4, 4, 200))
    fa = a.sample_f(pts)
    fb = b.sample_f(pts + (1 + 0.5j))
    # |f| is gauge invariant; compare moduli and the energy density
    assert np.max(np.abs(np.abs(fa) - np.abs(fb))) <= 1e-3
    ea = a.sample("energy_density", pts)
    eb = b.sample("energy_density", pts + (1 + 0.5j))
    assert np.max(np.abs(ea - eb)) <= 1e-3


def test_corrupted_solution_is_detected(solve):
    sol = solve(((0j, 2),), N)
    bad = dataclasses.replace(sol, f=sol.f * 1.1)
    assert residual_report(bad)[1] >= 0.05


def test_example_configuration(solve):
    cfg = ((-2 - 1j, 1), (3 + 4j, 2))
    sol = solve(cfg, N)
    assert sol.energy / math.pi == pytest.approx(3.0, abs=0.06)
    found = local_degrees(sol)
    assert found.degree == 3
    assert found.isclose(ZeroConfig(cfg), sol.grid.spacing)


def test_local_degrees_point_of_order_three(solve):
    sol = solve(((0j, 3),), N)
    found = local_degrees(sol)
    assert found.multiplicities == [3] and abs(found.positions[0]) < sol.grid.spacing


def test_synthetic_winding():
    g = Grid(6.0, 128)
    f = g.z / np.sqrt(1 + np.abs(g.z) ** 2)
    found = winding_degrees(g, f)
    assert found.multiplicities == [1] and abs(found.positions[0]) < g.spacing


def test_decay_of_synthetic_density():
    g = Grid(12.0, 512)
    dens = np.abs(g.z) ** -4.0
    assert decay_slope(g, dens, (4.0, 9.0)) == pytest.approx(-4.0, abs=0.05)
    with pytest.raises(InsufficientRange):
        decay_slope(g, dens, (4.0, 9.0), n_radii=5)


def test_decay_and_annulus(solve):
    sol = solve(((0j, 1),), N)
    assert decay_exponent(sol, (4.0, 9.6)) <= -3.5
    lhs, rhs, ok = annulus_check(sol, 2.0, 4.0, 0.5)
    assert ok and lhs <= rhs
    with pytest.raises(ValidationError):
        decay_exponent(sol, (0.5, 9.0))


def test_close_pair_is_ambiguous(solve):
    # |f| < 0.5 on every circle of radius < 1 around either zero
    sol = solve(((-1 + 0j, 1), (1 + 0j, 1)), N)
    with pytest.raises(AmbiguousZero):
        local_degrees(sol)


def test_triangle_recovered_with_default_probe(solve):
    zeros = ((-1.5 + 0j, 1), (1.5 + 0j, 1), (2j, 1))
    sol = solve(zeros, N)
    assert local_degrees(sol).isclose(ZeroConfig(zeros), sol.grid.spacing)
