"""Surface and boundary-line quadrature through the parameter domain.

Interior rules are tensor products of composite 1d rules: trapezoid (the
default, matching the order-2 stencils) or Simpson.  A periodic axis always
uses the equal-weight rule, which is the periodic trapezoid rule and
converges spectrally for smooth integrands.  Boundary segments use the
composite trapezoid rule with the metric line element.  All reductions go
through the deterministic pairwise kernel, so totals are reproducible to the
bit.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateSegment
from .fields import as_values
from .geometry import SurfaceGeometry


@dataclass(frozen=True)
class QuadratureRule:
    interior: str = "trapezoid"  # trapezoid | simpson
    boundary: str = "trapezoid"

    def __post_init__(self):
        if self.interior not in ("trapezoid", "simpson"):
            raise ValueError(f"unknown interior rule {self.interior!r}")
        if self.boundary != "trapezoid":
            raise ValueError("boundary rule is composite trapezoid")


def _axis_weights(n, h, periodic, rule):
    if periodic:
        return np.full(n, h)
    if rule == "trapezoid":
        w = np.full(n, h)
        w[0] = w[-1] = 0.5 * h
        return w
    # composite Simpson needs an even cell count
    if (n - 1) % 2 != 0:
        raise ValueError("Simpson rule needs an even number of cells per axis")
    w = np.full(n, 2.0 * h / 3.0)
    w[1::2] = 4.0 * h / 3.0
    w[0] = w[-1] = h / 3.0
    return w


def interior_weights(grid, rule: QuadratureRule = QuadratureRule()):
    """Tensor-product node weights; positive, summing to the domain area."""
    w1 = _axis_weights(grid.n1, grid.h1, False, rule.interior)
    w2 = _axis_weights(grid.n2, grid.h2, grid.periodic2, rule.interior)
    return np.outer(w1, w2)


def parameter_integral(values, grid, rule: QuadratureRule = QuadratureRule()):
    """Plain dX integral over the parameter domain (no metric factor)."""
    w = interior_weights(grid, rule)
    return _kernels.pairwise_sum((w * as_values(values)).ravel())


def surface_integral(f, geo: SurfaceGeometry,
                     rule: QuadratureRule = QuadratureRule()):
    """Integral of a scalar field over the surface at the geometry's time."""
    w = interior_weights(geo.grid, rule)
    return _kernels.pairwise_sum((w * as_values(f) * geo.sqrtG).ravel())


def surface_integral_vector(f, geo: SurfaceGeometry,
                            rule: QuadratureRule = QuadratureRule()):
    """Componentwise surface integral of a vector field, returns shape (3,)."""
    w = interior_weights(geo.grid, rule)
    fv = as_values(f)
    return np.array([
        _kernels.pairwise_sum((w * fv[k] * geo.sqrtG).ravel()) for k in range(3)
    ])


def _segment_quadrature(geo, segment, rule):
    nu, element, idx = geo.segment_data(segment)
    if np.any(element <= 1e-14):
        raise DegenerateSegment(f"segment {segment.name!r} line element vanished")
    g = geo.grid
    h = g.h1 if segment.axis == 0 else g.h2
    n = element.shape[0]
    w = _axis_weights(n, h, segment.closed, "trapezoid")
    return nu, element, idx, w


def boundary_integral(gfield, geo: SurfaceGeometry,
                      rule: QuadratureRule = QuadratureRule(), segments=None):
    """Line integral of a scalar over the surface boundary.

    ``gfield`` is a full grid field; values are read on each segment's nodes.
    Segments may be restricted by name.
    """
    total_parts = []
    for seg in geo.grid.boundary_segments():
        if segments is not None and seg.name not in segments:
            continue
        _, element, idx, w = _segment_quadrature(geo, seg, rule)
        vals = as_values(gfield)[idx]
        total_parts.append(_kernels.pairwise_sum((w * vals * element).ravel()))
    return float(np.sum(total_parts))


def conormal_flux(phi, geo: SurfaceGeometry,
                  rule: QuadratureRule = QuadratureRule(), segments=None):
    """Integral of nu . phi over the boundary for an ambient vector field."""
    total_parts = []
    pv = as_values(phi)
    for seg in geo.grid.boundary_segments():
        if segments is not None and seg.name not in segments:
            continue
        nu, element, idx, w = _segment_quadrature(geo, seg, rule)
        vals = np.einsum("i...,i...->...", nu, pv[(slice(None),) + idx])
        total_parts.append(_kernels.pairwise_sum((w * vals * element).ravel()))
    return float(np.sum(total_parts))


def boundary_component_integral(gfield_on_segment, geo, segment,
                                rule: QuadratureRule = QuadratureRule()):
    """Line integral of values already sampled on one segment's nodes."""
    _, element, _, w = _segment_quadrature(geo, segment, rule)
    vals = np.asarray(gfield_on_segment, dtype=np.float64)
    return _kernels.pairwise_sum((w * vals * element).ravel())
