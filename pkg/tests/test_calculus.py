"""Surface differential operators: exact cases, identities, convergence."""

import numpy as np
import pytest

from surfcalc import Grid, GridField, SurfaceGeometry, make_surface
from surfcalc import calculus as ca
from surfcalc import make_constitutive
from surfcalc.errors import InsufficientTimeLevels
from surfcalc.rng import Xoshiro256StarStar


@pytest.fixture(scope="module")
def disk64():
    surf = make_surface("flat-disk")
    grid = Grid(surf.domain, 64)
    return SurfaceGeometry(surf.spec, grid, 0.0)


@pytest.fixture(scope="module")
def sphere64():
    surf = make_surface("sphere-cap")
    grid = Grid(surf.domain, 64)
    return SurfaceGeometry(surf.spec, grid, 0.0)


def test_gradient_constant_is_zero(disk64):
    g = ca.surface_gradient(np.ones(disk64.grid.shape), disk64)
    assert np.abs(g.values).max() < 1e-13


def test_gradient_flat_coordinate(disk64):
    x = disk64.x[0]
    g = ca.surface_gradient(x, disk64)
    expect = np.zeros_like(g.values)
    expect[0] = 1.0
    assert np.abs(g.values - expect).max() < 5e-3
    assert g.tangency_defect(disk64) < 1e-12


def test_gradient_sphere_height(sphere64):
    x = sphere64.x
    g = ca.surface_gradient(x[2], sphere64)
    expect = np.stack([-x[2] * x[0], -x[2] * x[1], 1.0 - x[2] * x[2]])
    assert np.abs(g.values - expect).max() < 5e-4


def test_divergence_cases(disk64, sphere64):
    assert np.abs(ca.surface_divergence(
        np.broadcast_to(np.array([1.0, 2.0, 3.0])[:, None, None],
                        (3,) + disk64.grid.shape), disk64).values).max() < 1e-12
    x, y = disk64.x[0], disk64.x[1]
    radial = np.stack([x, y, 0 * x])
    assert np.abs(ca.surface_divergence(radial, disk64).values - 2.0).max() < 5e-3
    # outward normal of the unit sphere diverges at twice the curvature scale
    assert np.abs(ca.surface_divergence(sphere64.n, sphere64).values
                  - 2.0).max() < 5e-3
    assert np.abs(ca.surface_divergence(sphere64.n, sphere64).values
                  + sphere64.H).max() < 5e-3


def test_laplace_beltrami_cases(disk64, sphere64):
    x, y = disk64.x[0], disk64.x[1]
    assert np.abs(ca.laplace_beltrami(np.ones_like(x), 1.0, disk64).values).max() < 1e-12
    assert np.abs(ca.laplace_beltrami(x * x + y * y, 1.0, disk64).values
                  - 4.0).max() < 1e-9
    z = sphere64.x[2]
    # degree-one spherical harmonic: eigenvalue -2
    assert np.abs(ca.laplace_beltrami(z, 1.0, sphere64).values + 2 * z).max() < 2e-2


def test_stretching_tensor_flat(disk64):
    x, y = disk64.x[0], disk64.x[1]
    radial = np.stack([x, y, 0 * x])
    D = ca.stretching_tensor(radial, disk64)
    expect = np.zeros_like(D.values)
    expect[0, 0] = expect[1, 1] = 1.0
    assert np.abs(D.values - expect).max() < 6e-3
    const = np.broadcast_to(np.array([0.3, -0.1, 0.2])[:, None, None],
                            (3,) + disk64.grid.shape)
    assert np.abs(ca.stretching_tensor(const, disk64).values).max() < 1e-12


def test_stretching_annihilates_normal_exactly(sphere64):
    rng = Xoshiro256StarStar(4)
    x = sphere64.x
    v = np.stack([np.sin(x[0] + rng.uniform()), x[1] * x[2], np.cos(x[2])])
    D = ca.stretching_tensor(v, sphere64)
    assert D.tangency_defect(sphere64) < 1e-13
    assert np.abs(D.values - np.einsum("ji...->ij...", D.values)).max() == 0.0


def test_stress_tensor_cases(disk64):
    cs = make_constitutive("newtonian")
    x, y = disk64.x[0], disk64.x[1]
    zero_v = np.zeros((3,) + disk64.grid.shape)
    S0 = ca.stress_tensor(zero_v, np.zeros(disk64.grid.shape), disk64, cs)
    assert np.abs(S0.values).max() < 1e-12
    radial = np.stack([x, y, 0 * x])
    S = ca.stress_tensor(radial, np.zeros(disk64.grid.shape), disk64, cs)
    expect = np.zeros_like(S.values)
    expect[0, 0] = expect[1, 1] = 3.0  # D + (div v) P = diag(1,1,0) + 2 diag(1,1,0)
    assert np.abs(S.values - expect).max() < 2e-2
    assert S.tangency_defect(disk64) < 1e-12


def test_boussinesq_scriven_reduction(sphere64):
    """Linear laws reproduce the two-viscosity stress plus pressure part."""
    cs = make_constitutive("newtonian", {"mu1": 2.0, "mu2": 0.5})
    x = sphere64.x
    v = np.stack([x[1] * x[2], np.sin(x[0]), x[2] ** 2])
    sigma = 1.0 + 0.3 * x[0]
    S = ca.stress_tensor(v, sigma, sphere64, cs).values
    D = ca.stretching_tensor(v, sphere64).values
    div_v = ca.surface_divergence(v, sphere64).values
    expect = 2.0 * D + (0.5 * div_v - sigma) * sphere64.P
    assert np.abs(S - expect).max() < 1e-12


def test_dissipation_density(disk64):
    cs = make_constitutive("newtonian")
    x, y = disk64.x[0], disk64.x[1]
    radial = np.stack([x, y, 0 * x])
    ed = ca.dissipation_density(radial, disk64, cs)
    assert np.abs(ed.values - 6.0).max() < 4e-2  # |D|^2 + |div|^2 = 2 + 4
    const = np.zeros((3,) + disk64.grid.shape)
    assert np.abs(ca.dissipation_density(const, disk64, cs).values).max() == 0.0


def test_dissipation_nonnegative_for_dissipative_sets(sphere64):
    rng = Xoshiro256StarStar(9)
    x = sphere64.x
    v = np.stack([np.sin(2 * x[0]), x[1] * x[2], np.cos(x[2]) * rng.uniform()])
    for name in ("newtonian", "nonlinear-smooth", "shear-thickening"):
        cs = make_constitutive(name)
        assert cs.dissipative()
        ed = ca.dissipation_density(v, sphere64, cs)
        assert ed.values.min() >= 0.0


def test_leibniz_rule_converges():
    surf = make_surface("sphere-cap")
    errs = []
    for res in (16, 32, 64):
        geo = SurfaceGeometry(surf.spec, Grid(surf.domain, res), 0.0)
        x = geo.x
        f = 1.0 + 0.3 * x[0] + 0.2 * x[1] * x[2]
        phi = np.stack([x[1], np.sin(x[2]), x[0] * x[2]])
        lhs = ca.surface_divergence(f * phi, geo).values
        rhs = (np.einsum("i...,i...->...",
                         ca.surface_gradient(f, geo).values, phi)
               + f * ca.surface_divergence(phi, geo).values)
        errs.append(np.abs(lhs - rhs).max())
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert rates.min() > 1.9


def test_projection_divergence_identity():
    """div(f P) = grad f + f H n, evaluated through the tensor path."""
    surf = make_surface("sphere-cap")
    errs = []
    for res in (16, 32, 64):
        geo = SurfaceGeometry(surf.spec, Grid(surf.domain, res), 0.0)
        x = geo.x
        f = 1.0 + 0.4 * x[2] + 0.2 * x[0] * x[1]
        fP = f * geo.P
        lhs = ca.tensor_divergence(fP, geo).values
        rhs = ca.surface_gradient(f, geo).values + (f * geo.H) * geo.n
        errs.append(np.abs(lhs - rhs).max())
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert rates.min() > 1.9


def test_strain_invariants_cross_check():
    """Metric-rate contraction reproduces |D|^2 and (div v)^2."""
    surf = make_surface("expanding-sphere-cap")
    errs_d, errs_t = [], []
    for res in (16, 32, 64):
        geo = SurfaceGeometry(surf.spec, Grid(surf.domain, res), 0.5)
        D = ca.stretching_tensor(geo.v, geo).values
        dsq = np.einsum("ij...,ij...->...", D, D)
        div2 = ca.surface_divergence(geo.v, geo).values ** 2
        dsq_m, div2_m = ca.strain_invariants_from_metric_rate(geo)
        errs_d.append(np.abs(dsq - dsq_m).max())
        errs_t.append(np.abs(div2 - div2_m).max())
    for errs in (errs_d, errs_t):
        rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert rates.min() > 1.9


def test_material_derivative_variants():
    surf = make_surface("expanding-sphere-cap")
    grid = Grid(surf.domain, 16)
    dt = 1e-3
    times = (0.5 - dt, 0.5, 0.5 + dt)
    geos = [SurfaceGeometry(surf.spec, grid, t) for t in times]

    # time on the surface: rate one
    fs = [np.full(grid.shape, t) for t in times]
    out = ca.material_derivative(times, fs, geos)
    assert np.abs(out.values - 1.0).max() < 1e-10

    # squared distance from the origin on the expanding cap: 2 R R'
    fs = [np.einsum("i...,i...->...", g.x, g.x) for g in geos]
    out = ca.material_derivative(times, fs, geos)
    assert np.abs(out.values - 2.0 * 1.5).max() < 1e-6

    # stationary surface, constant field: all variants vanish
    flat = make_surface("flat-disk")
    geos_f = [SurfaceGeometry(flat.spec, Grid(flat.domain, 16), t) for t in times]
    fs = [np.ones(geos_f[0].grid.shape)] * 3
    for variant in ("D_t", "D_t_N", "D_t_Gamma"):
        out = ca.material_derivative(times, fs, geos_f, variant)
        assert np.abs(out.values).max() < 1e-12


def test_material_derivative_requires_three_levels():
    flat = make_surface("flat-disk")
    geo = SurfaceGeometry(flat.spec, Grid(flat.domain, 8), 0.0)
    with pytest.raises(InsufficientTimeLevels):
        ca.material_derivative([0.0], [np.zeros(geo.grid.shape)], [geo])


def test_material_derivative_tangential_needs_normal_data():
    surf = make_surface("expanding-sphere-cap")  # normal motion
    grid = Grid(surf.domain, 8)
    dt = 1e-3
    geos = [SurfaceGeometry(surf.spec, grid, 0.5 + k * dt) for k in (-1, 0, 1)]
    fs = [np.ones(grid.shape)] * 3
    with pytest.raises(ValueError):
        ca.material_derivative((0.5 - dt, 0.5, 0.5 + dt), fs, geos, "D_t_Gamma")
    out = ca.material_derivative((0.5 - dt, 0.5, 0.5 + dt), fs, geos, "D_t_Gamma",
                                 normal_derivative=np.zeros(grid.shape))
    assert np.abs(out.values).max() < 1e-12


def test_gridfield_rank_validation():
    with pytest.raises(ValueError):
        GridField(np.zeros((3, 4, 5)), "scalar")
    f = GridField(np.zeros((3, 4, 5)), "vector", units="m/s")
    assert f.grid_shape == (4, 5) and f.units == "m/s"


def test_gradient_tangency_on_curved_chart(sphere64):
    x = sphere64.x
    f = 0.3 * x[0] + x[1] * x[2] + np.sin(x[2])
    g = ca.surface_gradient(f, sphere64)
    assert g.tangency_defect(sphere64) < 1e-13
