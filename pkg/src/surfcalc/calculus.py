"""Surface differential operators on grid fields.

Every operator is built from one differentiation kernel: parameter-grid
stencils of the hatted samples, contracted with the dual tangents
g^a = g^{ab} g_b.  Tangential gradients of vector and tensor components use
the scalar formula per component, so projected quantities such as the
stretching tensor annihilate the normal exactly.
"""

import numpy as np

from .constitutive import ConstitutiveSet
from .errors import InsufficientTimeLevels
from .fields import GridField, as_values
from .geometry import SurfaceGeometry


def _d1(geo, f):
    return geo._grid_d(np.asarray(f, dtype=np.float64), 0)


def _d2(geo, f):
    return geo._grid_d(np.asarray(f, dtype=np.float64), 1)


def dot3(a, b):
    return np.einsum("i...,i...->...", a, b)


def surface_gradient(f, geo: SurfaceGeometry) -> GridField:
    """Tangential gradient of a scalar field, returned in ambient components."""
    fv = as_values(f)
    grad = geo.gu1 * _d1(geo, fv) + geo.gu2 * _d2(geo, fv)
    return GridField(grad, "vector", tangent=True)


def tangential_jacobian(v, geo: SurfaceGeometry) -> np.ndarray:
    """J[i, j] = tangential derivative of component v_i along ambient axis j."""
    vv = as_values(v)
    d1 = _d1(geo, vv)
    d2 = _d2(geo, vv)
    return (np.einsum("i...,j...->ij...", d1, geo.gu1)
            + np.einsum("i...,j...->ij...", d2, geo.gu2))


def surface_divergence(phi, geo: SurfaceGeometry) -> GridField:
    """g^a . d(phi)/dXa for an ambient-component vector field."""
    pv = as_values(phi)
    div = dot3(geo.gu1, _d1(geo, pv)) + dot3(geo.gu2, _d2(geo, pv))
    return GridField(div, "scalar")


def tensor_divergence(T, geo: SurfaceGeometry) -> GridField:
    """Row-wise surface divergence of a 3x3 tensor field."""
    Tv = as_values(T)
    d1 = _d1(geo, Tv)
    d2 = _d2(geo, Tv)
    out = (np.einsum("ij...,j...->i...", d1, geo.gu1)
           + np.einsum("ij...,j...->i...", d2, geo.gu2))
    return GridField(out, "vector")


def laplace_beltrami(f, kappa, geo: SurfaceGeometry) -> GridField:
    """div (kappa grad f) in conservative flux form.

    Fluxes kappa sqrtG g^{ab} df/dXb are assembled on nodes and divergenced
    with the same stencils, so the operator is the exact divergence of a
    discrete flux.
    """
    fv = as_values(f)
    kv = as_values(kappa) if not np.isscalar(kappa) else float(kappa)
    d1 = _d1(geo, fv)
    d2 = _d2(geo, fv)
    w = kv * geo.sqrtG
    flux1 = w * (geo.ginv[0, 0] * d1 + geo.ginv[0, 1] * d2)
    flux2 = w * (geo.ginv[1, 0] * d1 + geo.ginv[1, 1] * d2)
    out = (_d1(geo, flux1) + _d2(geo, flux2)) / geo.sqrtG
    return GridField(out, "scalar")


def stretching_tensor(v, geo: SurfaceGeometry) -> GridField:
    """Projected symmetric velocity gradient; annihilates n by construction."""
    J = tangential_jacobian(v, geo)
    JtP = np.einsum("ki...,kj...->ij...", J, geo.P)
    PJ = np.einsum("ik...,kj...->ij...", geo.P, J)
    return GridField(0.5 * (JtP + PJ), "tensor", tangent=True)


def stress_tensor(v, sigma, geo: SurfaceGeometry, cs: ConstitutiveSet) -> GridField:
    """Generalized viscous stress minus the pressure part of the projection."""
    D = stretching_tensor(v, geo).values
    div_v = surface_divergence(v, geo).values
    Dsq = np.einsum("ij...,ij...->...", D, D)
    sig = as_values(sigma)
    S = (cs.e1.d(Dsq) * D
         + (cs.e2.d(div_v**2) * div_v - sig) * geo.P)
    return GridField(S, "tensor", tangent=True)


def dissipation_density(v, geo: SurfaceGeometry, cs: ConstitutiveSet) -> GridField:
    """e1'(|D|^2)|D|^2 + e2'(|div|^2)|div|^2, the viscous heating density."""
    D = stretching_tensor(v, geo).values
    div_v = surface_divergence(v, geo).values
    Dsq = np.einsum("ij...,ij...->...", D, D)
    dv2 = div_v * div_v
    return GridField(cs.e1.d(Dsq) * Dsq + cs.e2.d(dv2) * dv2, "scalar")


def strain_invariants_from_metric_rate(geo: SurfaceGeometry):
    """|D(v)|^2 and (div v)^2 from the metric rate contraction.

    Cross-check path: (1/4) gdot_ab gdot_ze g^{az} g^{be} reproduces the
    squared stretching tensor, and half the trace of gdot against g^{ab}
    reproduces the divergence.
    """
    gd = geo.gdot
    gi = geo.ginv
    # raise both indices of gdot
    up = np.einsum("ac...,cd...,bd...->ab...", gi, gd, gi)
    dsq = 0.25 * np.einsum("ab...,ab...->...", up, gd)
    tr = 0.5 * np.einsum("ab...,ab...->...", gi, gd)
    return dsq, tr * tr


def material_derivative(times, values, geos, variant="D_t", velocity=None,
                        normal_derivative=None) -> GridField:
    """Material derivative from Lagrangian samples at three or more times.

    ``values`` are samples f(x(X, t), t) along the flow map; the plain
    material derivative is then the centered time difference at the middle
    level.  The tangential and normal-transport variants subtract the
    appropriate advection term evaluated with spatial operators at the middle
    level.  The normal variant of a scalar needs no off-surface data; the
    tangential variant does (the normal derivative of an extension), so it
    must be supplied in closed form unless the motion is tangential.
    """
    if len(times) < 3 or len(values) < 3 or len(geos) < 3:
        raise InsufficientTimeLevels("need at least three time levels")
    mid = len(times) // 2
    dt_plus = times[mid + 1] - times[mid]
    dt_minus = times[mid] - times[mid - 1]
    if not np.isclose(dt_plus, dt_minus):
        raise ValueError("time levels must be uniformly spaced")
    f_prev = as_values(values[mid - 1])
    f_next = as_values(values[mid + 1])
    geo = geos[mid]
    dtf = (f_next - f_prev) / (dt_plus + dt_minus)
    if variant == "D_t":
        out = dtf
    elif variant == "D_t_N":
        v = geo.v if velocity is None else as_values(velocity)
        adv = advect(values[mid], v, geo)
        out = dtf - adv
    elif variant == "D_t_Gamma":
        v = geo.v if velocity is None else as_values(velocity)
        vn = dot3(geo.n, v)
        if normal_derivative is None:
            if float(np.max(np.abs(vn))) > 1e-10:
                raise ValueError(
                    "tangential variant needs normal_derivative for non-tangential motion"
                )
            out = dtf
        else:
            out = dtf - vn * as_values(normal_derivative)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    f_mid = as_values(values[mid])
    rank = {0: "scalar", 1: "vector", 2: "tensor"}[f_mid.ndim - 2]
    return GridField(out, rank)


def advect(f, v, geo: SurfaceGeometry) -> np.ndarray:
    """(v . grad_Gamma) f for tangential v, applied per component."""
    fv = as_values(f)
    vv = as_values(v)
    u1 = dot3(vv, geo.gu1)
    u2 = dot3(vv, geo.gu2)
    return u1 * _d1(geo, fv) + u2 * _d2(geo, fv)
