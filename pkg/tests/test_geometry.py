"""Metric, curvature, normal, velocity and co-normal evaluation."""

import numpy as np
import pytest

from surfcalc import (
    CornerNode,
    DiffConfig,
    Grid,
    SingularMetric,
    SurfaceGeometry,
    eval_conormal,
    eval_metric,
    eval_velocity,
    make_surface,
    strip_derivatives,
)
from surfcalc.flowmap import FlowMapSpec
from surfcalc.domain import unit_square


def flat_patch_spec():
    def pos(x1, x2, t):
        z = np.zeros(np.broadcast(np.asarray(x1), np.asarray(x2)).shape)
        return np.stack([x1 + z, x2 + z, z])

    return FlowMapSpec("flat-patch", pos)


def test_flat_patch_metric_point():
    ms = eval_metric(flat_patch_spec(), (0.3, 0.7), 0.0)
    assert np.allclose(ms.n, [0.0, 0.0, 1.0])
    assert np.allclose(ms.P[:2, :2], np.eye(2)) and ms.P[2, 2] == pytest.approx(0.0)
    assert ms.H == pytest.approx(0.0, abs=1e-6)
    assert ms.G == pytest.approx(1.0, rel=1e-9)


def test_sphere_cap_curvature_analytic():
    surf = make_surface("sphere-cap")
    grid = Grid(surf.domain, 32)
    geo = SurfaceGeometry(surf.spec, grid, 0.0)
    # outward normal: curvature is -2 everywhere on the unit sphere
    assert np.abs(geo.H + 2.0).max() < 1e-12
    assert np.abs(np.einsum("i...,i...->...", geo.n, geo.x) - 1.0).max() < 1e-12


def test_sphere_cap_curvature_fd_convergence():
    surf = make_surface("sphere-cap")
    fd = strip_derivatives(surf.spec)
    errs = []
    for res in (16, 32, 64):
        geo = SurfaceGeometry(fd, Grid(surf.domain, res), 0.0)
        errs.append(np.abs(geo.H + 2.0).max())
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert rates.min() > 1.9


def test_expanding_cap_metric_scaling():
    surf = make_surface("expanding-sphere-cap")
    grid = Grid(surf.domain, 16)
    g0 = SurfaceGeometry(surf.spec, grid, 0.0)
    g1 = SurfaceGeometry(surf.spec, grid, 1.0)
    R = 2.0  # radius 1 + t at t = 1
    assert np.allclose(g1.G, R**4 * g0.G, rtol=1e-12)
    assert np.abs(g1.H + 2.0 / R).max() < 1e-12


def test_projection_invariants_all_catalog():
    for name in ("flat-disk", "translating-disk", "sphere-cap",
                 "expanding-sphere-cap", "graph-surface"):
        surf = make_surface(name)
        geo = SurfaceGeometry(surf.spec, Grid(surf.domain, 12), 0.3)
        p2, pn, tr = geo.projection_defect()
        assert max(p2, pn, tr) < 1e-12, name
        assert geo.determinant_consistency() < 1e-12, name


def test_velocity_cases():
    flat = make_surface("flat-disk")
    assert np.allclose(eval_velocity(flat.spec, (0.5, 1.0), 0.2), 0.0)
    trans = make_surface("translating-disk", {"velocity": (0.0, 0.2, 0.1)})
    v = eval_velocity(trans.spec, (0.5, 1.0), 0.7)
    assert np.allclose(v, [0.0, 0.2, 0.1])
    cap = make_surface("expanding-sphere-cap")
    v = eval_velocity(cap.spec, (0.7, 0.3), 0.0)
    # rate-one expansion of the unit chart: speed one at t = 0
    assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-12)


def test_velocity_fd_fallback():
    fd = strip_derivatives(make_surface("expanding-sphere-cap").spec)
    v = eval_velocity(fd, (0.7, 0.3), 0.5)
    assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-6)


def test_singular_metric_raises():
    def pos(x1, x2, t):
        z = np.zeros(np.broadcast(np.asarray(x1), np.asarray(x2)).shape)
        return np.stack([x1 + z, x1 + z, z])  # rank-deficient chart

    spec = FlowMapSpec("degenerate", pos)
    with pytest.raises(SingularMetric):
        eval_metric(spec, (0.5, 0.5), 0.0)


def test_conormal_flat_bottom_edge():
    # flat patch over the unit square: bottom edge has co-normal -e_y
    spec = flat_patch_spec()
    dom = unit_square()
    nu = eval_conormal(spec, dom, (0.5, 0.0), 0.0)
    assert np.allclose(nu, [0.0, -1.0, 0.0], atol=1e-12)


def test_conormal_hemisphere_equator():
    surf = make_surface("sphere-cap", {"theta_min": 0.2,
                                       "theta_max": float(np.pi / 2)})
    nu = eval_conormal(surf.spec, surf.domain, (np.pi / 2, 1.1), 0.0)
    assert np.allclose(nu, [0.0, 0.0, -1.0], atol=1e-12)


def test_conormal_orthogonal_to_normal_everywhere():
    for name in ("flat-disk", "sphere-cap", "graph-surface"):
        surf = make_surface(name)
        grid = Grid(surf.domain, 16)
        geo = SurfaceGeometry(surf.spec, grid, 0.0)
        for seg in grid.boundary_segments():
            nu, element, idx = geo.segment_data(seg)
            n_edge = geo.n[(slice(None),) + idx]
            assert np.abs(np.einsum("i...,i...->...", nu, n_edge)).max() < 1e-12
            assert np.abs(np.einsum("i...,i...->...", nu, nu) - 1.0).max() < 1e-12


def test_conormal_corner_raises():
    spec = flat_patch_spec()
    dom = unit_square()
    with pytest.raises(CornerNode):
        eval_conormal(spec, dom, (0.0, 0.0), 0.0)
    nu = eval_conormal(spec, dom, (0.0, 0.0), 0.0, segment="x2-min")
    assert np.allclose(nu, [0.0, -1.0, 0.0], atol=1e-12)


def test_metric_rate_analytic_vs_fd():
    surf = make_surface("expanding-sphere-cap")
    grid = Grid(surf.domain, 12)
    geo = SurfaceGeometry(surf.spec, grid, 0.5)
    fd_geo = SurfaceGeometry(strip_derivatives(surf.spec), grid, 0.5,
                             DiffConfig(order=2, time_step=1e-5))
    # uniform expansion: half-trace of the metric rate is 2 R'/R
    expect = 2.0 / 1.5
    assert np.abs(geo.metric_rate_trace - expect).max() < 1e-12
    assert np.abs(fd_geo.metric_rate_trace - expect).max() < 1e-4
