"""Parameter domains and structured grids.

All built-in domains are rectangles in parameter space.  Charts that wrap an
angle (polar disks) mark the second axis periodic; the angular seam is then
interior to the surface and only the radial edges are physical boundary.
Each boundary segment is an axis-aligned curve r -> (p(r), q(r)) with a
constant outward normal in parameter space.
"""

from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class BoundarySegment:
    """One piece of the parameter-domain boundary.

    ``axis`` is the grid axis along which the segment runs; the other axis is
    pinned at ``fixed_value``.  ``outward_normal`` is the outward unit normal
    of the parameter domain along the segment.  ``component`` groups segments
    into closed loops (an annulus has two).
    """

    name: str
    axis: int
    fixed_value: float
    param_range: Tuple[float, float]
    curve: Tuple[Callable, Callable]
    outward_normal: Tuple[float, float]
    component: int
    closed: bool = False  # full periodic loop (no endpoints)

    def points(self, r):
        r = np.asarray(r, dtype=np.float64)
        return self.curve[0](r), self.curve[1](r)

    def tangent_norm(self, r):
        # |(dp/dr, dq/dr)| for the axis-aligned parametrization is 1
        return np.ones_like(np.asarray(r, dtype=np.float64))


@dataclass(frozen=True)
class ParamDomain:
    """Rectangular parameter region with named boundary segments."""

    kind: str
    bounds: Tuple[Tuple[float, float], Tuple[float, float]]
    periodic_axis2: bool
    segments: Tuple[BoundarySegment, ...] = field(default=())

    @property
    def extent(self):
        (a1, b1), (a2, b2) = self.bounds
        return (b1 - a1, b2 - a2)

    @property
    def area(self):
        e1, e2 = self.extent
        return e1 * e2

    def validate(self):
        """Check segment chaining per boundary component and corner motion."""
        (a1, b1), (a2, b2) = self.bounds
        if not (b1 > a1 and b2 > a2):
            raise ValueError("domain bounds must be increasing per axis")
        by_comp = {}
        for seg in self.segments:
            by_comp.setdefault(seg.component, []).append(seg)
        for comp, segs in by_comp.items():
            if len(segs) == 1 and segs[0].closed:
                continue
            for k, seg in enumerate(segs):
                nxt = segs[(k + 1) % len(segs)]
                end = np.array(seg.points(seg.param_range[1]))
                start = np.array(nxt.points(nxt.param_range[0]))
                if not np.allclose(end, start, atol=1e-12):
                    raise ValueError(
                        f"boundary component {comp}: segment '{seg.name}' does not "
                        f"chain into '{nxt.name}'"
                    )
            for seg in segs:
                r = np.linspace(*seg.param_range, 17)
                dr = seg.param_range[1] - seg.param_range[0]
                p, q = seg.points(r)
                dp = np.gradient(p, r) if dr != 0 else np.zeros_like(r)
                dq = np.gradient(q, r) if dr != 0 else np.zeros_like(r)
                if np.any(np.hypot(dp, dq) <= 0.0):
                    raise ValueError(f"segment '{seg.name}' has a stagnant point")
        return self


def _axis_segment(name, axis, fixed_value, lo, hi, normal, component, closed=False):
    if axis == 0:
        curve = (lambda r: np.asarray(r, dtype=float) * 1.0,
                 lambda r: np.full_like(np.asarray(r, dtype=float), fixed_value))
    else:
        curve = (lambda r: np.full_like(np.asarray(r, dtype=float), fixed_value),
                 lambda r: np.asarray(r, dtype=float) * 1.0)
    return BoundarySegment(
        name=name,
        axis=axis,
        fixed_value=fixed_value,
        param_range=(lo, hi),
        curve=curve,
        outward_normal=normal,
        component=component,
        closed=closed,
    )


def unit_square(a1=0.0, b1=1.0, a2=0.0, b2=1.0):
    """Rectangle with four chained segments (counterclockwise)."""
    segs = (
        _axis_segment("x2-min", 0, a2, a1, b1, (0.0, -1.0), 0),
        _axis_segment("x1-max", 1, b1, a2, b2, (1.0, 0.0), 0),
        # reversed runs keep the loop chained end to end
        BoundarySegment("x2-max", 0, b2, (a1, b1),
                        (lambda r: b1 + a1 - np.asarray(r, dtype=float),
                         lambda r: np.full_like(np.asarray(r, dtype=float), b2)),
                        (0.0, 1.0), 0),
        BoundarySegment("x1-min", 1, a1, (a2, b2),
                        (lambda r: np.full_like(np.asarray(r, dtype=float), a1),
                         lambda r: b2 + a2 - np.asarray(r, dtype=float)),
                        (-1.0, 0.0), 0),
    )
    return ParamDomain("unit-square", ((a1, b1), (a2, b2)), False, segs).validate()


def disk_polar(r_inner, r_outer):
    """Annular (radius, angle) rectangle, periodic in the angle.

    The chart excludes the polar point, so the radial coordinate must start
    strictly above zero; the two radial edges are the physical boundary
    circles (one loop each).
    """
    if r_inner <= 0.0:
        raise ValueError("polar charts require r_inner > 0 (singular at the pole)")
    if r_outer <= r_inner:
        raise ValueError("need r_outer > r_inner")
    segs = (
        _axis_segment("r-max", 1, r_outer, 0.0, TWO_PI, (1.0, 0.0), 0, closed=True),
        _axis_segment("r-min", 1, r_inner, 0.0, TWO_PI, (-1.0, 0.0), 1, closed=True),
    )
    return ParamDomain(
        "disk-via-polar", ((r_inner, r_outer), (0.0, TWO_PI)), True, segs
    ).validate()


def annulus_sector(r_inner, r_outer, phi0, phi1):
    """Partial annulus; all four edges are physical boundary."""
    if r_inner <= 0.0:
        raise ValueError("polar charts require r_inner > 0")
    if not (r_outer > r_inner and phi1 > phi0):
        raise ValueError("need r_outer > r_inner and phi1 > phi0")
    if phi1 - phi0 >= TWO_PI:
        raise ValueError("sector opening must be below a full turn")
    segs = (
        _axis_segment("phi-min", 0, phi0, r_inner, r_outer, (0.0, -1.0), 0),
        _axis_segment("r-max", 1, r_outer, phi0, phi1, (1.0, 0.0), 0),
        BoundarySegment("phi-max", 0, phi1, (r_inner, r_outer),
                        (lambda r: r_outer + r_inner - np.asarray(r, dtype=float),
                         lambda r: np.full_like(np.asarray(r, dtype=float), phi1)),
                        (0.0, 1.0), 0),
        BoundarySegment("r-min", 1, r_inner, (phi0, phi1),
                        (lambda r: np.full_like(np.asarray(r, dtype=float), r_inner),
                         lambda r: phi1 + phi0 - np.asarray(r, dtype=float)),
                        (-1.0, 0.0), 0),
    )
    return ParamDomain(
        "annulus-sector", ((r_inner, r_outer), (phi0, phi1)), False, segs
    ).validate()


class Grid:
    """Tensor-product node grid over a parameter domain.

    ``resolution`` counts cells per axis.  A periodic second axis stores the
    seam node once (n2 == resolution); non-periodic axes store both endpoints.
    """

    def __init__(self, domain: ParamDomain, resolution: int):
        if resolution < 4:
            raise ValueError("resolution must be at least 4")
        self.domain = domain
        self.resolution = resolution
        (a1, b1), (a2, b2) = domain.bounds
        self.n1 = resolution + 1
        self.h1 = (b1 - a1) / resolution
        self.periodic2 = domain.periodic_axis2
        if self.periodic2:
            self.n2 = resolution
            self.h2 = (b2 - a2) / resolution
            self.x2 = a2 + self.h2 * np.arange(self.n2)
        else:
            self.n2 = resolution + 1
            self.h2 = (b2 - a2) / resolution
            self.x2 = np.linspace(a2, b2, self.n2)
        self.x1 = np.linspace(a1, b1, self.n1)
        self.X1, self.X2 = np.meshgrid(self.x1, self.x2, indexing="ij")

    @property
    def shape(self):
        return (self.n1, self.n2)

    @property
    def h_max(self):
        return max(self.h1, self.h2)

    def segment_nodes(self, segment: BoundarySegment):
        """Indexing tuple selecting a boundary segment's grid nodes.

        Nodes run in the segment's own orientation.  Non-periodic segments
        include both endpoints (corner nodes are shared with the adjacent
        segment; quadrature weights stay correct because each segment uses a
        trapezoid rule with half weights at its ends).
        """
        if segment.axis == 0:
            if np.isclose(segment.fixed_value, self.x2[0]):
                return (slice(None), 0)
            if np.isclose(segment.fixed_value, self.domain.bounds[1][1]):
                return (slice(None), self.n2 - 1)
        else:
            if np.isclose(segment.fixed_value, self.x1[0]):
                return (0, slice(None))
            if np.isclose(segment.fixed_value, self.x1[-1]):
                return (self.n1 - 1, slice(None))
        raise ValueError(f"segment {segment.name} does not lie on a grid edge")

    def boundary_segments(self):
        return self.domain.segments
