"""Integral-identity checks reported as discretization residuals.

Each check evaluates the two sides of an identity through deliberately
different computational paths (stencil operators and quadrature on one side,
analytic metric data or boundary quadrature on the other) and reports the
absolute gap plus a normalized form.  Exact identities leave nothing but
discretization error, so refinement studies of these residuals are the
primary verification instrument.
"""

from dataclasses import dataclass

import numpy as np

from . import calculus as ca
from .constitutive import ConstitutiveSet
from .fields import as_values
from .geometry import SurfaceGeometry
from .quadrature import (
    QuadratureRule,
    conormal_flux,
    parameter_integral,
    surface_integral,
)


@dataclass
class CheckResult:
    """Two-sided residual record for one identity at one resolution."""

    name: str
    lhs: float
    rhs: float
    h: float = np.nan
    dt: float = np.nan

    @property
    def abs_residual(self):
        return abs(self.lhs - self.rhs)

    @property
    def rel_residual(self):
        return self.abs_residual / max(abs(self.lhs), abs(self.rhs), 1.0)


def check_energy_representations(geo: SurfaceGeometry, cs: ConstitutiveSet,
                                 sigma, theta, conc,
                                 theta_partials=None, conc_partials=None,
                                 rule: QuadratureRule = QuadratureRule()):
    """Six surface-vs-parameter energy-density identities.

    The left sides integrate stencil-built surface operators of the sampled
    velocity and scalars over the surface; the right sides use the metric
    rate and, when provided, analytic chart partials of the scalars, so the
    two paths share no differentiation step.
    """
    v = geo.v
    h = geo.grid.h_max
    results = []

    div_v = ca.surface_divergence(v, geo).values
    D = ca.stretching_tensor(v, geo).values
    Dsq = np.einsum("ij...,ij...->...", D, D)
    trace_rate = geo.metric_rate_trace
    dsq_metric, div2_metric = ca.strain_invariants_from_metric_rate(geo)

    results.append(CheckResult(
        "total-dilation-rate",
        surface_integral(div_v, geo, rule),
        parameter_integral(geo.dsqrtG_dt, geo.grid, rule), h))

    sig = as_values(sigma)
    results.append(CheckResult(
        "pressure-work-rate",
        surface_integral(div_v * sig, geo, rule),
        parameter_integral(trace_rate * sig * geo.sqrtG, geo.grid, rule), h))

    results.append(CheckResult(
        "shear-energy",
        surface_integral(0.5 * cs.e1(Dsq), geo, rule),
        parameter_integral(0.5 * cs.e1(dsq_metric) * geo.sqrtG, geo.grid, rule), h))

    results.append(CheckResult(
        "dilation-energy",
        surface_integral(0.5 * cs.e2(div_v**2), geo, rule),
        parameter_integral(0.5 * cs.e2(div2_metric) * geo.sqrtG, geo.grid, rule), h))

    for label, law, values, partials in (
        ("thermal-gradient-energy", cs.e3, theta, theta_partials),
        ("species-gradient-energy", cs.e4, conc, conc_partials),
    ):
        fv = as_values(values)
        grad = ca.surface_gradient(fv, geo).values
        lhs = surface_integral(0.5 * law(np.einsum("i...,i...->...", grad, grad)),
                               geo, rule)
        if partials is None:
            d1 = geo._grid_d(fv, 0)
            d2 = geo._grid_d(fv, 1)
        else:
            d1, d2 = partials
        quad = (geo.ginv[0, 0] * d1 * d1 + 2.0 * geo.ginv[0, 1] * d1 * d2
                + geo.ginv[1, 1] * d2 * d2)
        rhs = parameter_integral(0.5 * law(quad) * geo.sqrtG, geo.grid, rule)
        results.append(CheckResult(label, lhs, rhs, h))
    return results


def check_divergence_theorem(phi, geo: SurfaceGeometry,
                             rule: QuadratureRule = QuadratureRule()) -> CheckResult:
    """Surface divergence theorem: bulk terms against the co-normal flux."""
    pv = as_values(phi)
    div = ca.surface_divergence(pv, geo).values
    n_dot = np.einsum("i...,i...->...", geo.n, pv)
    lhs = surface_integral(div + geo.H * n_dot, geo, rule)
    rhs = conormal_flux(pv, geo, rule)
    return CheckResult("divergence-theorem", lhs, rhs, geo.grid.h_max)


def check_integration_by_parts(f, g, j, geo: SurfaceGeometry,
                               rule: QuadratureRule = QuadratureRule()) -> CheckResult:
    """Componentwise integration by parts with the curvature term."""
    fv = as_values(f)
    gv = as_values(g)
    dj_g = ca.surface_gradient(gv, geo).values[j]
    dj_f = ca.surface_gradient(fv, geo).values[j]
    lhs = surface_integral(fv * dj_g + (dj_f + geo.H * geo.n[j] * fv) * gv, geo, rule)
    prod = np.zeros((3,) + geo.grid.shape)
    prod[j] = fv * gv
    rhs = conormal_flux(prod, geo, rule)
    return CheckResult(f"integration-by-parts-{j}", lhs, rhs, geo.grid.h_max)


def check_transport_theorem(f_values, geos, rule: QuadratureRule = QuadratureRule()
                            ) -> CheckResult:
    """Transport theorem: rate of a surface integral against its density form.

    ``f_values`` holds samples along the flow map at three uniformly spaced
    times matching ``geos``; the left side differentiates the integral in
    time, the right side integrates the material rate plus dilation at the
    middle level.
    """
    if len(f_values) != 3 or len(geos) != 3:
        raise ValueError("transport check needs exactly three time levels")
    t_prev, t_mid, t_next = (g.t for g in geos)
    dt = 0.5 * (t_next - t_prev)
    integrals = [surface_integral(as_values(fk), g, rule)
                 for fk, g in zip(f_values, geos)]
    lhs = (integrals[2] - integrals[0]) / (t_next - t_prev)
    geo = geos[1]
    dtf = (as_values(f_values[2]) - as_values(f_values[0])) / (t_next - t_prev)
    div_v = ca.surface_divergence(geo.v, geo).values
    rhs = surface_integral(dtf + div_v * as_values(f_values[1]), geo, rule)
    return CheckResult("transport-theorem", lhs, rhs, geo.grid.h_max, dt)
