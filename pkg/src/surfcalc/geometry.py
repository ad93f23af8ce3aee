"""Metric, normal, curvature and co-normal evaluation on surface grids.

The normal is oriented along g1 x g2; the curvature scalar follows the
convention in which the outward-oriented unit sphere has H = -2, i.e.
H = g^{ab} (n . d2x/dXa dXb) and equals minus the surface divergence of n.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .domain import BoundarySegment, Grid
from .errors import CornerNode, DegenerateSegment, SingularMetric
from .flowmap import FlowMapSpec

DEFAULT_LAMBDA2 = 1e-10


@dataclass(frozen=True)
class DiffConfig:
    """Stencil configuration for grid derivatives."""

    order: int = 2
    time_step: float = 1e-6  # central step for finite-difference time derivatives


@dataclass
class MetricState:
    """Per-point geometric package (arrays broadcast over trailing axes)."""

    g1: np.ndarray
    g2: np.ndarray
    g_ab: np.ndarray      # shape (2, 2, ...)
    ginv_ab: np.ndarray   # shape (2, 2, ...)
    G: np.ndarray
    n: np.ndarray
    P: np.ndarray         # shape (3, 3, ...)
    H: np.ndarray
    nu: Optional[np.ndarray] = None


def _dot3(a, b):
    return np.einsum("i...,i...->...", a, b)


def _cross3(a, b):
    return np.stack([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def _point_derivs(spec: FlowMapSpec, X1, X2, t):
    """Analytic or small-step central-difference chart derivatives at points."""
    d = spec.fd_step
    if spec.analytic_space:
        g1 = spec.d1(X1, X2, t)
        g2 = spec.d2(X1, X2, t)
    else:
        g1 = (spec.position(X1 + d, X2, t) - spec.position(X1 - d, X2, t)) / (2 * d)
        g2 = (spec.position(X1, X2 + d, t) - spec.position(X1, X2 - d, t)) / (2 * d)
    if spec.analytic_curvature:
        x11 = spec.d11(X1, X2, t)
        x12 = spec.d12(X1, X2, t)
        x22 = spec.d22(X1, X2, t)
    else:
        p = spec.position
        x0 = p(X1, X2, t)
        x11 = (p(X1 + d, X2, t) - 2 * x0 + p(X1 - d, X2, t)) / d**2
        x22 = (p(X1, X2 + d, t) - 2 * x0 + p(X1, X2 - d, t)) / d**2
        x12 = (p(X1 + d, X2 + d, t) - p(X1 + d, X2 - d, t)
               - p(X1 - d, X2 + d, t) + p(X1 - d, X2 - d, t)) / (4 * d**2)
    return g1, g2, x11, x12, x22


def _metric_from_tangents(g1, g2, x11, x12, x22, lambda2):
    g11 = _dot3(g1, g1)
    g12 = _dot3(g1, g2)
    g22 = _dot3(g2, g2)
    G = g11 * g22 - g12 * g12
    if np.any(G < lambda2):
        raise SingularMetric(
            f"metric determinant min {float(np.min(G)):.3e} below floor {lambda2:.3e}"
        )
    cr = _cross3(g1, g2)
    sqrtG = np.sqrt(G)
    n = cr / sqrtG
    inv = 1.0 / G
    ginv = np.stack([np.stack([g22 * inv, -g12 * inv]),
                     np.stack([-g12 * inv, g11 * inv])])
    g_ab = np.stack([np.stack([g11, g12]), np.stack([g12, g22])])
    eye = np.zeros((3, 3) + np.shape(G))
    for i in range(3):
        eye[i, i] = 1.0
    P = eye - np.einsum("i...,j...->ij...", n, n)
    b11 = _dot3(n, x11)
    b12 = _dot3(n, x12)
    b22 = _dot3(n, x22)
    H = ginv[0, 0] * b11 + 2.0 * ginv[0, 1] * b12 + ginv[1, 1] * b22
    return MetricState(g1=g1, g2=g2, g_ab=g_ab, ginv_ab=ginv, G=G, n=n, P=P, H=H)


def eval_metric(spec: FlowMapSpec, X, t, lambda2=DEFAULT_LAMBDA2) -> MetricState:
    """Metric package at a parameter point (or broadcastable point arrays)."""
    X1 = np.asarray(X[0], dtype=np.float64)
    X2 = np.asarray(X[1], dtype=np.float64)
    g1, g2, x11, x12, x22 = _point_derivs(spec, X1, X2, t)
    return _metric_from_tangents(g1, g2, x11, x12, x22, lambda2)


def eval_velocity(spec: FlowMapSpec, X, t):
    """Surface velocity dx/dt at a parameter point."""
    X1 = np.asarray(X[0], dtype=np.float64)
    X2 = np.asarray(X[1], dtype=np.float64)
    if spec.dt is not None:
        return spec.dt(X1, X2, t)
    d = spec.fd_step
    return (spec.position(X1, X2, t + d) - spec.position(X1, X2, t - d)) / (2 * d)


def conormal_from_tangents(g1, g2, normal_u):
    """Unit outer co-normal from tangents and the parameter-space normal."""
    n1u, n2u = normal_u
    w = n1u * g2 - n2u * g1
    wn = np.sqrt(_dot3(w, w))
    cr = _cross3(g1, g2)
    crn = np.sqrt(_dot3(cr, cr))
    return _cross3(w / wn, cr / crn)


def eval_conormal(spec: FlowMapSpec, domain, X, t, segment: Optional[str] = None,
                  lambda2=DEFAULT_LAMBDA2):
    """Unit outer co-normal at a boundary point.

    Corner points belong to two segments with different one-sided co-normals;
    the caller must disambiguate with ``segment`` there.
    """
    X1, X2 = float(X[0]), float(X[1])
    hits = []
    for seg in domain.segments:
        if seg.axis == 0 and np.isclose(X2, seg.fixed_value):
            hits.append(seg)
        elif seg.axis == 1 and np.isclose(X1, seg.fixed_value):
            hits.append(seg)
    if not hits:
        raise ValueError("point does not lie on a boundary segment")
    if segment is not None:
        hits = [s for s in hits if s.name == segment]
        if not hits:
            raise ValueError(f"point is not on segment {segment!r}")
    if len(hits) > 1:
        raise CornerNode(
            f"point lies on segments {[s.name for s in hits]}; pass segment="
        )
    seg = hits[0]
    ms = eval_metric(spec, (X1, X2), t, lambda2)
    return conormal_from_tangents(ms.g1, ms.g2, seg.outward_normal)


class SurfaceGeometry:
    """All geometric fields of one surface at one time on one grid.

    Derivatives are analytic when the spec provides them; otherwise they are
    grid stencils of the sampled positions (finite-difference mode).  Time
    derivatives fall back to small central differences in t.
    """

    def __init__(self, spec: FlowMapSpec, grid: Grid, t: float,
                 diff: DiffConfig = DiffConfig(), lambda2: float = DEFAULT_LAMBDA2):
        self.spec = spec
        self.grid = grid
        self.t = float(t)
        self.diff = diff
        self.lambda2 = lambda2
        X1, X2 = grid.X1, grid.X2
        self.x = spec.position(X1, X2, t)

        if spec.analytic_space:
            g1 = spec.d1(X1, X2, t)
            g2 = spec.d2(X1, X2, t)
        else:
            g1 = self._grid_d(self.x, 0)
            g2 = self._grid_d(self.x, 1)
        if spec.analytic_curvature:
            x11 = spec.d11(X1, X2, t)
            x12 = spec.d12(X1, X2, t)
            x22 = spec.d22(X1, X2, t)
        else:
            x11 = self._grid_d(g1, 0)
            x12 = self._grid_d(g1, 1)
            x22 = self._grid_d(g2, 1)
        ms = _metric_from_tangents(g1, g2, x11, x12, x22, lambda2)
        self.metric = ms
        self.g1, self.g2 = ms.g1, ms.g2
        self.g11 = ms.g_ab[0, 0]
        self.g12 = ms.g_ab[0, 1]
        self.g22 = ms.g_ab[1, 1]
        self.ginv = ms.ginv_ab
        self.G = ms.G
        self.sqrtG = np.sqrt(ms.G)
        self.n = ms.n
        self.P = ms.P
        self.H = ms.H
        # dual tangents g^a = g^{ab} g_b
        self.gu1 = self.ginv[0, 0] * self.g1 + self.ginv[0, 1] * self.g2
        self.gu2 = self.ginv[1, 0] * self.g1 + self.ginv[1, 1] * self.g2
        self._v = None
        self._gdot = None
        self._accel = None

    # -- derivative helpers ------------------------------------------------

    def _grid_d(self, field, axis):
        """Stencil derivative of a (possibly component-stacked) grid field."""
        g = self.grid
        h = g.h1 if axis == 0 else g.h2
        periodic = g.periodic2 and axis == 1
        f = np.asarray(field, dtype=np.float64)
        if f.ndim == 2:
            return _kernels.diff1(f, axis, h, self.diff.order, periodic)
        flat = f.reshape((-1,) + f.shape[-2:])
        out = np.stack([
            _kernels.diff1(flat[k], axis, h, self.diff.order, periodic)
            for k in range(flat.shape[0])
        ])
        return out.reshape(f.shape)

    @property
    def v(self):
        """Velocity of the parametrization, dx/dt on the grid."""
        if self._v is None:
            if self.spec.dt is not None:
                self._v = self.spec.dt(self.grid.X1, self.grid.X2, self.t)
            else:
                d = self.diff.time_step
                p = self.spec.position
                self._v = (p(self.grid.X1, self.grid.X2, self.t + d)
                           - p(self.grid.X1, self.grid.X2, self.t - d)) / (2 * d)
        return self._v

    @property
    def accel(self):
        """Second time derivative of the flow map on the grid."""
        if self._accel is None:
            if self.spec.dtt is not None:
                self._accel = self.spec.dtt(self.grid.X1, self.grid.X2, self.t)
            else:
                d = self.diff.time_step
                p = self.spec.position
                x0 = p(self.grid.X1, self.grid.X2, self.t)
                self._accel = (p(self.grid.X1, self.grid.X2, self.t + d) - 2 * x0
                               + p(self.grid.X1, self.grid.X2, self.t - d)) / d**2
        return self._accel

    @property
    def gdot(self):
        """Time derivative of the covariant metric, shape (2, 2, n1, n2)."""
        if self._gdot is None:
            if self.spec.analytic_metric_rate:
                w1 = self.spec.dt1(self.grid.X1, self.grid.X2, self.t)
                w2 = self.spec.dt2(self.grid.X1, self.grid.X2, self.t)
            else:
                w1 = self._grid_d(self.v, 0)
                w2 = self._grid_d(self.v, 1)
            d11 = 2.0 * _dot3(w1, self.g1)
            d12 = _dot3(w1, self.g2) + _dot3(self.g1, w2)
            d22 = 2.0 * _dot3(w2, self.g2)
            self._gdot = np.stack([np.stack([d11, d12]), np.stack([d12, d22])])
        return self._gdot

    @property
    def metric_rate_trace(self):
        """(1/2) gdot_ab g^{ab}; equals the surface divergence of the motion."""
        gd = self.gdot
        return 0.5 * (gd[0, 0] * self.ginv[0, 0] + 2.0 * gd[0, 1] * self.ginv[0, 1]
                      + gd[1, 1] * self.ginv[1, 1])

    @property
    def dsqrtG_dt(self):
        return self.metric_rate_trace * self.sqrtG

    # -- boundary ------------------------------------------------------------

    def segment_data(self, segment: BoundarySegment):
        """Co-normal, line element and node index for one boundary segment."""
        idx = self.grid.segment_nodes(segment)
        g1 = self.g1[(slice(None),) + idx]
        g2 = self.g2[(slice(None),) + idx]
        tangent = g1 if segment.axis == 0 else g2
        element = np.sqrt(_dot3(tangent, tangent))
        if np.any(element <= 1e-14):
            raise DegenerateSegment(
                f"line element vanishes on segment {segment.name!r}"
            )
        nu = conormal_from_tangents(g1, g2, segment.outward_normal)
        return nu, element, idx

    # -- invariant helpers ---------------------------------------------------

    def projection_defect(self):
        """max |P^2 - P|, |P n| and |trace P - 2| over the grid."""
        PP = np.einsum("ik...,kj...->ij...", self.P, self.P)
        tp = self.P[0, 0] + self.P[1, 1] + self.P[2, 2]
        return (
            float(np.max(np.abs(PP - self.P))),
            float(np.max(np.abs(np.einsum("ij...,j...->i...", self.P, self.n)))),
            float(np.max(np.abs(tp - 2.0))),
        )

    def determinant_consistency(self):
        """max relative gap between det(g_ab) and |g1 x g2|^2."""
        cr = _cross3(self.g1, self.g2)
        alt = _dot3(cr, cr)
        return float(np.max(np.abs(alt - self.G) / np.abs(self.G)))
