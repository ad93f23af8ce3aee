"""Energy functionals, numerical Gateaux derivatives, and closed-form forces.

The consistency content: for each energy functional, the derivative along an
admissible direction computed by central differencing in the perturbation
parameter (with Richardson extrapolation over a step ladder) must match the
surface integral of the closed-form force against that direction.  A second
family of checks perturbs the flow map itself and compares the action-integral
derivative with the inertial and pressure forces, using the transported
density representation rho = rho0 sqrtG(0)/sqrtG(t).
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import calculus as ca
from .constitutive import ConstitutiveSet
from .errors import StepTooSmall
from .fields import GridField, as_values
from .flowmap import FlowMapSpec
from .geometry import SurfaceGeometry
from .identities import CheckResult
from .quadrature import QuadratureRule, parameter_integral, surface_integral
from .rng import Xoshiro256StarStar

FUNCTIONALS = ("dissipation", "work", "thermal", "species")
DEFAULT_EPS_LADDER = (1e-2, 1e-3, 1e-4)


@dataclass
class VariationDirection:
    """An admissible perturbation direction for one functional argument."""

    kind: str  # velocity | scalar
    field: GridField
    tangential: bool = False
    compact_support: bool = True

    def validate(self, geo: SurfaceGeometry, tol=1e-12):
        vals = self.field.values
        if self.compact_support:
            for seg in geo.grid.boundary_segments():
                idx = geo.grid.segment_nodes(seg)
                edge = vals[(Ellipsis,) + idx] if vals.ndim > 2 else vals[idx]
                if float(np.max(np.abs(edge))) > tol:
                    raise ValueError(
                        f"direction does not vanish on boundary segment {seg.name}"
                    )
        if self.tangential and self.field.rank == "vector":
            defect = self.field.tangency_defect(geo)
            if defect > tol:
                raise ValueError(f"tangential direction has |n.phi| = {defect:.2e}")
        return self


def _bump(s):
    # vanishes with its first two derivatives at s = 0, 1; peak value 1
    return (4.0 * s * (1.0 - s)) ** 3


def random_scalar_direction(geo: SurfaceGeometry, rng: Xoshiro256StarStar,
                            modes: int = 2) -> np.ndarray:
    """Smooth seeded scalar field vanishing to second order on the boundary."""
    g = geo.grid
    (a1, b1), (a2, b2) = g.domain.bounds
    s1 = (g.X1 - a1) / (b1 - a1)
    prof = _bump(s1)
    if g.periodic2:
        phi = g.X2
        acc = rng.uniform(-1, 1) * np.ones_like(phi)
        for l in range(1, modes + 1):
            acc = acc + rng.uniform(-1, 1) * np.cos(l * phi) \
                      + rng.uniform(-1, 1) * np.sin(l * phi)
        radial = 1.0 + 0.5 * rng.uniform(-1, 1) * s1
        return prof * radial * acc
    s2 = (g.X2 - a2) / (b2 - a2)
    prof = prof * _bump(s2)
    acc = np.zeros_like(s1)
    for k in range(1, modes + 1):
        for l in range(1, modes + 1):
            acc = acc + rng.uniform(-1, 1) * np.sin(np.pi * k * s1) \
                      * np.sin(np.pi * l * s2)
    return prof * (rng.uniform(-1, 1) + acc)


def random_direction(geo: SurfaceGeometry, rng: Xoshiro256StarStar, kind: str,
                     tangential: bool = False, modes: int = 2) -> VariationDirection:
    """Seeded compact-support direction; vectors optionally projected tangent."""
    if kind == "scalar":
        return VariationDirection(
            "scalar", GridField(random_scalar_direction(geo, rng, modes), "scalar")
        ).validate(geo)
    comps = np.stack([random_scalar_direction(geo, rng, modes) for _ in range(3)])
    if tangential:
        comps = np.einsum("ij...,j...->i...", geo.P, comps)
    return VariationDirection(
        "velocity", GridField(comps, "vector", tangent=tangential), tangential
    ).validate(geo)


# --- functionals ------------------------------------------------------------


def energy_functional(which: str, state, geo: SurfaceGeometry, cs: ConstitutiveSet,
                      rule: QuadratureRule = QuadratureRule(),
                      v=None, theta=None, conc=None) -> float:
    """Evaluate one of the four energies at the given (possibly perturbed) fields."""
    v = as_values(state.v) if v is None else as_values(v)
    if which == "dissipation":
        D = ca.stretching_tensor(v, geo).values
        dsq = np.einsum("ij...,ij...->...", D, D)
        dv = ca.surface_divergence(v, geo).values
        return -surface_integral(0.5 * (cs.e1(dsq) + cs.e2(dv * dv)), geo, rule)
    if which == "work":
        dv = ca.surface_divergence(v, geo).values
        sig = as_values(state.sigma)
        rho = as_values(state.rho)
        F = as_values(state.F)
        fdotv = np.einsum("i...,i...->...", F, v)
        return surface_integral(dv * sig + rho * fdotv, geo, rule)
    if which == "thermal":
        th = as_values(state.theta) if theta is None else as_values(theta)
        gr = ca.surface_gradient(th, geo).values
        q = np.einsum("i...,i...->...", gr, gr)
        return -surface_integral(0.5 * cs.e3(q), geo, rule)
    if which == "species":
        cc = as_values(state.C) if conc is None else as_values(conc)
        gr = ca.surface_gradient(cc, geo).values
        q = np.einsum("i...,i...->...", gr, gr)
        return -surface_integral(0.5 * cs.e4(q), geo, rule)
    raise ValueError(f"unknown functional {which!r}; use one of {FUNCTIONALS}")


def _richardson(eps_list, values):
    """Neville extrapolation to zero step assuming an even-power error series."""
    u = [e * e for e in eps_list]
    tab = [list(values)]
    tops = [values[0]]
    for level in range(1, len(values)):
        prev = tab[-1]
        cur = []
        for i in range(len(prev) - 1):
            denom = u[i + level] - u[i]
            cur.append((u[i + level] * prev[i] - u[i] * prev[i + 1]) / denom)
        tab.append(cur)
        tops.append(cur[0])
    corrections = [abs(tops[k] - tops[k - 1]) for k in range(1, len(tops))]
    return tops[-1], corrections


def gateaux_numeric(which: str, state, geo: SurfaceGeometry, cs: ConstitutiveSet,
                    direction: VariationDirection,
                    eps_list: Sequence[float] = DEFAULT_EPS_LADDER,
                    rule: QuadratureRule = QuadratureRule()):
    """Central-difference directional derivative with Richardson extrapolation.

    Returns ``(value, error_estimate)``.  Raises StepTooSmall when the
    extrapolation corrections grow instead of shrinking, which indicates the
    differences are dominated by rounding cancellation.
    """
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    dvals = []
    dirv = direction.field.values
    for eps in eps_list:
        if which in ("dissipation", "work"):
            base = as_values(state.v)
            e_plus = energy_functional(which, state, geo, cs, rule, v=base + eps * dirv)
            e_minus = energy_functional(which, state, geo, cs, rule, v=base - eps * dirv)
        elif which == "thermal":
            base = as_values(state.theta)
            e_plus = energy_functional(which, state, geo, cs, rule, theta=base + eps * dirv)
            e_minus = energy_functional(which, state, geo, cs, rule, theta=base - eps * dirv)
        else:
            base = as_values(state.C)
            e_plus = energy_functional(which, state, geo, cs, rule, conc=base + eps * dirv)
            e_minus = energy_functional(which, state, geo, cs, rule, conc=base - eps * dirv)
        dvals.append((e_plus - e_minus) / (2.0 * eps))
    value, corrections = _richardson(eps_list, dvals)
    scale = max(max(abs(d) for d in dvals), 1e-300)
    if len(corrections) >= 2:
        # growth below the relative rounding floor is extrapolation noise
        floor = 1e-9 * max(scale, 1.0)
        if corrections[-1] > corrections[-2] and corrections[-1] > floor:
            raise StepTooSmall(
                f"extrapolation corrections grew: {corrections}; "
                "perturbation differences are at rounding level"
            )
    err = corrections[-1] if corrections else np.nan
    return value, err


def variational_force(which: str, state, geo: SurfaceGeometry, cs: ConstitutiveSet,
                      tangential: bool = False) -> GridField:
    """Closed-form first variation of the named energy.

    Vector-valued for the velocity functionals, scalar for the gradient
    energies.  The tangential variant premultiplies by the surface projection.
    """
    if which == "dissipation":
        v = as_values(state.v)
        D = ca.stretching_tensor(v, geo).values
        dsq = np.einsum("ij...,ij...->...", D, D)
        dv = ca.surface_divergence(v, geo).values
        S = cs.e1.d(dsq) * D + (cs.e2.d(dv * dv) * dv) * geo.P
        force = ca.tensor_divergence(S, geo).values
    elif which == "work":
        sig = as_values(state.sigma)
        grad_sig = ca.surface_gradient(sig, geo).values
        force = -grad_sig - (sig * geo.H) * geo.n
        rho = as_values(state.rho)
        force = force + rho * as_values(state.F)
    elif which in ("thermal", "species"):
        field = as_values(state.theta if which == "thermal" else state.C)
        law = cs.e3 if which == "thermal" else cs.e4
        gr = ca.surface_gradient(field, geo).values
        kappa = law.d(np.einsum("i...,i...->...", gr, gr))
        return GridField(ca.laplace_beltrami(field, kappa, geo).values, "scalar")
    else:
        raise ValueError(f"unknown functional {which!r}")
    if tangential:
        force = np.einsum("ij...,j...->i...", geo.P, force)
    return GridField(force, "vector", tangent=tangential)


def pairing_integral(force: GridField, direction: VariationDirection,
                     geo: SurfaceGeometry,
                     rule: QuadratureRule = QuadratureRule()) -> float:
    """Surface integral of force . direction."""
    f = force.values
    d = direction.field.values
    if force.rank == "vector":
        integrand = np.einsum("i...,i...->...", f, d)
    else:
        integrand = f * d
    return surface_integral(integrand, geo, rule)


def check_force_pairing(which: str, state, geo: SurfaceGeometry, cs: ConstitutiveSet,
                        direction: VariationDirection,
                        eps_list: Sequence[float] = DEFAULT_EPS_LADDER,
                        rule: QuadratureRule = QuadratureRule(),
                        tangential: bool = False) -> CheckResult:
    """Numerical Gateaux derivative against the closed-form force pairing."""
    num, _ = gateaux_numeric(which, state, geo, cs, direction, eps_list, rule)
    force = variational_force(which, state, geo, cs, tangential)
    paired = pairing_integral(force, direction, geo, rule)
    label = f"pairing-{which}" + ("-tangential" if tangential else "")
    return CheckResult(label, num, paired, geo.grid.h_max)


# --- transported density and action variation -------------------------------


def density_transport(rho0, geos: Sequence[SurfaceGeometry],
                      reference: Optional[SurfaceGeometry] = None):
    """Density along the flow from its initial profile: rho0 sqrtG0/sqrtG(t)."""
    ref = geos[0] if reference is None else reference
    r0 = as_values(rho0)
    weighted = r0 * ref.sqrtG
    return [GridField(weighted / g.sqrtG, "scalar") for g in geos]


@dataclass(frozen=True)
class FlowPerturbation:
    """Closed-form flow-map perturbation direction with chart derivatives.

    The perturbed map is position + eps * z; ``z`` must vanish at t = 0 so
    all family members share the initial surface.
    """

    z: Callable
    d1: Callable
    d2: Callable
    dt: Callable


def bump_perturbation(grid, direction=(0.0, 0.0, 1.0), window: float = 0.4):
    """Separable perturbation: space bump times a time bump over the window.

    The spatial factor vanishes with its first derivative on every
    non-periodic boundary, so the direction field is admissible for both
    action variants; the time factor vanishes at both window endpoints, so
    the integration by parts in time carries no boundary terms.
    """
    (a1, b1), (a2, b2) = grid.domain.bounds
    L1 = b1 - a1
    c = np.asarray(direction, dtype=np.float64)
    periodic = grid.periodic2
    L2 = b2 - a2
    T = float(window)

    def shape(X1, X2):
        s1 = (X1 - a1) / L1
        b = _bump(s1)
        if not periodic:
            b = b * _bump((X2 - a2) / L2)
        else:
            b = b * (1.0 + 0.3 * np.sin(X2))
        return b

    def dshape1(X1, X2):
        s1 = (X1 - a1) / L1
        db = 3.0 * (4.0 * s1 * (1 - s1)) ** 2 * (4.0 - 8.0 * s1) / L1
        if not periodic:
            db = db * _bump((X2 - a2) / L2)
        else:
            db = db * (1.0 + 0.3 * np.sin(X2))
        return db

    def dshape2(X1, X2):
        s1 = (X1 - a1) / L1
        if not periodic:
            s2 = (X2 - a2) / L2
            return _bump(s1) * 3.0 * (4.0 * s2 * (1 - s2)) ** 2 * (4.0 - 8.0 * s2) / L2
        return _bump(s1) * 0.3 * np.cos(X2)

    def ramp(t):
        tau = t / T
        return _bump(tau)

    def dramp(t):
        tau = t / T
        return 3.0 * (4.0 * tau * (1 - tau)) ** 2 * (4.0 - 8.0 * tau) / T

    def stackc(base, X1):
        out = np.zeros((3,) + np.shape(base))
        for i in range(3):
            out[i] = c[i] * base
        return out

    return FlowPerturbation(
        z=lambda X1, X2, t: stackc(shape(X1, X2) * ramp(t), X1),
        d1=lambda X1, X2, t: stackc(dshape1(X1, X2) * ramp(t), X1),
        d2=lambda X1, X2, t: stackc(dshape2(X1, X2) * ramp(t), X1),
        dt=lambda X1, X2, t: stackc(shape(X1, X2) * dramp(t), X1),
    )


def check_domain_variation(geo: SurfaceGeometry, pert: FlowPerturbation,
                           eps: float = 1e-4,
                           rule: QuadratureRule = QuadratureRule()) -> CheckResult:
    """Surface integral of div z against the area-element variation rate."""
    g = geo.grid
    zv = pert.z(g.X1, g.X2, geo.t)
    lhs = surface_integral(ca.surface_divergence(zv, geo).values, geo, rule)
    z1 = pert.d1(g.X1, g.X2, geo.t)
    z2 = pert.d2(g.X1, g.X2, geo.t)

    def sqrtG_eps(s):
        e1 = geo.g1 + s * z1
        e2 = geo.g2 + s * z2
        g11 = np.einsum("i...,i...->...", e1, e1)
        g12 = np.einsum("i...,i...->...", e1, e2)
        g22 = np.einsum("i...,i...->...", e2, e2)
        return np.sqrt(g11 * g22 - g12 * g12)

    rhs = parameter_integral((sqrtG_eps(eps) - sqrtG_eps(-eps)) / (2 * eps),
                             g, rule)
    return CheckResult("domain-variation", lhs, rhs, g.h_max)


def check_action_variation(spec: FlowMapSpec, grid, pert: FlowPerturbation,
                           rho0, cs: ConstitutiveSet, which: str = "inertia",
                           t_final: float = 0.4, nt: int = 16,
                           eps_list: Sequence[float] = DEFAULT_EPS_LADDER,
                           rule: QuadratureRule = QuadratureRule(),
                           diff=None) -> CheckResult:
    """Flow-map variation of the action against the closed-form force pairing.

    ``which`` selects the kinetic-only action ("inertia") or the kinetic plus
    pressure-potential action ("barotropic"); the latter requires the
    perturbation to vanish on the boundary, which the bump construction
    guarantees.  All three discretization parameters enter: the grid spacing
    (stencils and quadrature), the time step of the window (trapezoid in time
    and centered material acceleration), and the variation step ladder.
    """
    from .geometry import DiffConfig

    diff = diff or DiffConfig()
    times = np.linspace(0.0, t_final, nt + 1)
    dt = times[1] - times[0]
    X1, X2 = grid.X1, grid.X2
    geos = [SurfaceGeometry(spec, grid, t, diff) for t in times]
    r0 = as_values(rho0)
    rho_w = r0 * geos[0].sqrtG  # conserved parameter-density rho0 sqrtG(0)

    z0 = pert.z(X1, X2, 0.0)
    if float(np.max(np.abs(z0))) > 1e-12:
        raise ValueError("flow perturbation must vanish at t = 0")

    w_t = np.full(nt + 1, dt)
    w_t[0] = w_t[-1] = 0.5 * dt

    def action(eps):
        total = 0.0
        for k, t in enumerate(times):
            vel = geos[k].v + eps * pert.dt(X1, X2, t)
            kin = 0.5 * rho_w * np.einsum("i...,i...->...", vel, vel)
            val = -parameter_integral(kin, grid, rule)
            if which == "barotropic":
                z1 = pert.d1(X1, X2, t)
                z2 = pert.d2(X1, X2, t)
                e1 = geos[k].g1 + eps * z1
                e2 = geos[k].g2 + eps * z2
                g11 = np.einsum("i...,i...->...", e1, e1)
                g12 = np.einsum("i...,i...->...", e1, e2)
                g22 = np.einsum("i...,i...->...", e2, e2)
                sG = np.sqrt(g11 * g22 - g12 * g12)
                val += parameter_integral(cs.p(rho_w / sG) * sG, grid, rule)
            total += w_t[k] * val
        return total

    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    dvals = [(action(e) - action(-e)) / (2 * e) for e in eps_list]
    lhs, _ = _richardson(eps_list, dvals)

    # force side: rho Dt v (+ effective-pressure terms), paired with z in time
    total = 0.0
    for k, t in enumerate(times):
        geo = geos[k]
        if k == 0:
            dtv = (-3.0 * geos[0].v + 4.0 * geos[1].v - geos[2].v) / (2 * dt)
        elif k == nt:
            dtv = (3.0 * geos[nt].v - 4.0 * geos[nt - 1].v + geos[nt - 2].v) / (2 * dt)
        else:
            dtv = (geos[k + 1].v - geos[k - 1].v) / (2 * dt)
        rho = rho_w / geo.sqrtG
        force = rho * dtv
        if which == "barotropic":
            peff = cs.effective_pressure(rho)
            force = force + ca.surface_gradient(peff, geo).values \
                + (peff * geo.H) * geo.n
        zv = pert.z(X1, X2, t)
        total += w_t[k] * parameter_integral(
            np.einsum("i...,i...->...", force, zv) * geo.sqrtG, grid, rule)
    return CheckResult(f"action-variation-{which}", lhs, total, grid.h_max, dt)
