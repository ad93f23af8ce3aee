"""Flow maps and the built-in surface catalog.

A flow map sends a parameter point and a time to an ambient position,
``(X1, X2, t) -> R^3``.  Catalog entries carry closed-form first and second
derivatives; a spec can also be demoted to finite-difference mode, where
derivatives are taken from the sampled positions (grid stencils for bulk
evaluation, small central differences for point evaluation).
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .domain import ParamDomain, disk_polar, unit_square

Map3 = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class FlowMapSpec:
    """Closed-form evolving-surface chart with optional analytic derivatives.

    All callables take ``(X1, X2, t)`` with broadcastable arrays and return a
    stacked array of shape ``(3,) + broadcast_shape``.  Missing derivatives
    mark the spec as finite-difference; ``fd_step`` is the central-difference
    step used by point evaluation in that case.
    """

    name: str
    position: Map3
    d1: Optional[Map3] = None
    d2: Optional[Map3] = None
    dt: Optional[Map3] = None
    d11: Optional[Map3] = None
    d12: Optional[Map3] = None
    d22: Optional[Map3] = None
    dt1: Optional[Map3] = None
    dt2: Optional[Map3] = None
    dtt: Optional[Map3] = None
    time_horizon: float = np.inf
    fd_step: float = 1e-6

    @property
    def analytic_space(self) -> bool:
        return self.d1 is not None and self.d2 is not None

    @property
    def analytic_curvature(self) -> bool:
        return all(f is not None for f in (self.d11, self.d12, self.d22))

    @property
    def analytic_metric_rate(self) -> bool:
        return self.dt1 is not None and self.dt2 is not None


def strip_derivatives(spec: FlowMapSpec, fd_step: float = 1e-6) -> FlowMapSpec:
    """Finite-difference twin of a spec (used in convergence studies)."""
    return replace(
        spec,
        name=spec.name + "-fd",
        d1=None, d2=None, dt=None,
        d11=None, d12=None, d22=None,
        dt1=None, dt2=None, dtt=None,
        fd_step=fd_step,
    )


@dataclass(frozen=True)
class Surface:
    """A parameter domain paired with its flow map."""

    name: str
    domain: ParamDomain
    spec: FlowMapSpec
    params: dict


def _stack(*comps):
    return np.stack([np.asarray(c, dtype=np.float64) for c in comps])


def _broadcast_zeros(X1, X2):
    z = np.zeros(np.broadcast(np.asarray(X1), np.asarray(X2)).shape)
    return z


# --- catalog charts -------------------------------------------------------


def flat_disk(inner_radius=0.2, outer_radius=1.0):
    """Stationary flat annulus in the z=0 plane, polar chart (r, phi)."""

    def pos(r, p, t):
        return _stack(r * np.cos(p), r * np.sin(p), _broadcast_zeros(r, p))

    def d1(r, p, t):
        return _stack(np.cos(p) + 0.0 * r, np.sin(p) + 0.0 * r, _broadcast_zeros(r, p))

    def d2(r, p, t):
        return _stack(-r * np.sin(p), r * np.cos(p), _broadcast_zeros(r, p))

    def zero3(r, p, t):
        z = _broadcast_zeros(r, p)
        return _stack(z, z, z)

    def d12(r, p, t):
        return _stack(-np.sin(p) + 0.0 * r, np.cos(p) + 0.0 * r, _broadcast_zeros(r, p))

    def d22(r, p, t):
        return _stack(-r * np.cos(p), -r * np.sin(p), _broadcast_zeros(r, p))

    spec = FlowMapSpec(
        "flat-disk", pos, d1=d1, d2=d2, dt=zero3,
        d11=zero3, d12=d12, d22=d22, dt1=zero3, dt2=zero3, dtt=zero3,
    )
    dom = disk_polar(inner_radius, outer_radius)
    return Surface("flat-disk", dom, spec,
                   dict(inner_radius=inner_radius, outer_radius=outer_radius))


def translating_disk(velocity=(0.1, 0.0, 0.0), inner_radius=0.2, outer_radius=1.0):
    """Flat annulus in rigid translation: positions shift by t * velocity."""
    c = np.asarray(velocity, dtype=np.float64)
    base = flat_disk(inner_radius, outer_radius)
    bp = base.spec

    def pos(r, p, t):
        x = bp.position(r, p, t)
        return x + c.reshape((3,) + (1,) * (x.ndim - 1)) * t

    def dt(r, p, t):
        z = _broadcast_zeros(r, p)
        return _stack(c[0] + z, c[1] + z, c[2] + z)

    spec = replace(bp, name="translating-disk", position=pos, dt=dt)
    return Surface("translating-disk", base.domain, spec,
                   dict(velocity=tuple(c), inner_radius=inner_radius,
                        outer_radius=outer_radius))


def _sphere_chart(radius_of_t, rate_of_t, accel_of_t, name):
    """Sphere cap chart (theta, phi), radius a prescribed function of time."""

    def pos(th, p, t):
        R = radius_of_t(t)
        return _stack(R * np.sin(th) * np.cos(p), R * np.sin(th) * np.sin(p),
                      R * np.cos(th) + 0.0 * p)

    def d1(th, p, t):
        R = radius_of_t(t)
        return _stack(R * np.cos(th) * np.cos(p), R * np.cos(th) * np.sin(p),
                      -R * np.sin(th) + 0.0 * p)

    def d2(th, p, t):
        R = radius_of_t(t)
        return _stack(-R * np.sin(th) * np.sin(p), R * np.sin(th) * np.cos(p),
                      _broadcast_zeros(th, p))

    def d11(th, p, t):
        R = radius_of_t(t)
        return _stack(-R * np.sin(th) * np.cos(p), -R * np.sin(th) * np.sin(p),
                      -R * np.cos(th) + 0.0 * p)

    def d12(th, p, t):
        R = radius_of_t(t)
        return _stack(-R * np.cos(th) * np.sin(p), R * np.cos(th) * np.cos(p),
                      _broadcast_zeros(th, p))

    def d22(th, p, t):
        R = radius_of_t(t)
        return _stack(-R * np.sin(th) * np.cos(p), -R * np.sin(th) * np.sin(p),
                      _broadcast_zeros(th, p))

    def dt(th, p, t):
        Rp = rate_of_t(t)
        return _stack(Rp * np.sin(th) * np.cos(p), Rp * np.sin(th) * np.sin(p),
                      Rp * np.cos(th) + 0.0 * p)

    def dt1(th, p, t):
        Rp = rate_of_t(t)
        return _stack(Rp * np.cos(th) * np.cos(p), Rp * np.cos(th) * np.sin(p),
                      -Rp * np.sin(th) + 0.0 * p)

    def dt2(th, p, t):
        Rp = rate_of_t(t)
        return _stack(-Rp * np.sin(th) * np.sin(p), Rp * np.sin(th) * np.cos(p),
                      _broadcast_zeros(th, p))

    def dtt(th, p, t):
        Rpp = accel_of_t(t)
        return _stack(Rpp * np.sin(th) * np.cos(p), Rpp * np.sin(th) * np.sin(p),
                      Rpp * np.cos(th) + 0.0 * p)

    return FlowMapSpec(name, pos, d1=d1, d2=d2, dt=dt, d11=d11, d12=d12,
                       d22=d22, dt1=dt1, dt2=dt2, dtt=dtt)


def sphere_cap(radius=1.0, theta_min=0.2, theta_max=1.4):
    """Stationary spherical cap, polar angle bounded away from the pole."""
    if theta_min <= 0.0 or theta_max >= np.pi:
        raise ValueError("sphere cap chart must exclude the poles")
    spec = _sphere_chart(lambda t: radius, lambda t: 0.0, lambda t: 0.0,
                         "sphere-cap")
    dom = disk_polar(theta_min, theta_max)
    return Surface("sphere-cap", dom, spec,
                   dict(radius=radius, theta_min=theta_min, theta_max=theta_max))


def expanding_sphere_cap(rate=1.0, accel=0.0, radius=1.0, theta_min=0.2,
                         theta_max=1.4):
    """Sphere cap with radius R(t) = radius * (1 + rate t + accel t^2).

    A nonzero quadratic term gives the motion a material acceleration, which
    the action-variation checks need to be nontrivial.
    """
    if theta_min <= 0.0 or theta_max >= np.pi:
        raise ValueError("sphere cap chart must exclude the poles")
    spec = _sphere_chart(lambda t: radius * (1.0 + rate * t + accel * t * t),
                         lambda t: radius * (rate + 2.0 * accel * t),
                         lambda t: radius * 2.0 * accel,
                         "expanding-sphere-cap")
    base = sphere_cap(radius, theta_min, theta_max)
    return Surface("expanding-sphere-cap", base.domain, spec,
                   dict(rate=rate, accel=accel, radius=radius,
                        theta_min=theta_min, theta_max=theta_max))


def graph_surface(amplitude=0.3, k1=1, k2=1, rate=0.0):
    """Graph z = A sin(pi k1 X1) sin(pi k2 X2) (1 + rate t) over the unit square."""
    A, b = float(amplitude), float(rate)
    w1, w2 = np.pi * k1, np.pi * k2

    def f(X1, X2, t):
        return A * np.sin(w1 * X1) * np.sin(w2 * X2) * (1.0 + b * t)

    def pos(X1, X2, t):
        return _stack(X1 + 0.0 * X2, X2 + 0.0 * X1, f(X1, X2, t))

    def d1(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(1.0 + z, z, A * w1 * np.cos(w1 * X1) * np.sin(w2 * X2) * (1 + b * t))

    def d2(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(z, 1.0 + z, A * w2 * np.sin(w1 * X1) * np.cos(w2 * X2) * (1 + b * t))

    def dt(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(z, z, A * b * np.sin(w1 * X1) * np.sin(w2 * X2))

    def d11(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(z, z, -A * w1 * w1 * np.sin(w1 * X1) * np.sin(w2 * X2) * (1 + b * t))

    def d12(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(z, z, A * w1 * w2 * np.cos(w1 * X1) * np.cos(w2 * X2) * (1 + b * t))

    def d22(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(z, z, -A * w2 * w2 * np.sin(w1 * X1) * np.sin(w2 * X2) * (1 + b * t))

    def dt1(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(z, z, A * b * w1 * np.cos(w1 * X1) * np.sin(w2 * X2))

    def dt2(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(z, z, A * b * w2 * np.sin(w1 * X1) * np.cos(w2 * X2))

    def dtt(X1, X2, t):
        z = _broadcast_zeros(X1, X2)
        return _stack(z, z, z)

    spec = FlowMapSpec("graph-surface", pos, d1=d1, d2=d2, dt=dt, d11=d11,
                       d12=d12, d22=d22, dt1=dt1, dt2=dt2, dtt=dtt)
    return Surface("graph-surface", unit_square(), spec,
                   dict(amplitude=A, k1=k1, k2=k2, rate=b))


CATALOG = {
    "flat-disk": flat_disk,
    "translating-disk": translating_disk,
    "sphere-cap": sphere_cap,
    "expanding-sphere-cap": expanding_sphere_cap,
    "graph-surface": graph_surface,
}


def make_surface(name: str, params: Optional[dict] = None) -> Surface:
    """Instantiate a catalog surface by name."""
    if name not in CATALOG:
        raise KeyError(f"unknown surface {name!r}; available: {sorted(CATALOG)}")
    return CATALOG[name](**(params or {}))
