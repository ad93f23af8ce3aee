"""Tangential barotropic flow, surface diffusion, and system residuals.

Unknowns live on the fixed parameter grid; the flow map carries all surface
motion.  The continuity update advances the conserved parameter density
rho sqrtG in flux-divergence form with the telescoping boundary closure, so
the discrete total mass is exact to rounding under no-slip.  The momentum
update advances the sampled velocity with the effective-pressure gradient
and relative advection, re-projecting onto the tangent plane and re-imposing
the wall condition after every stage.  Only the tangential systems are time
integrated; the full generalized system is evaluated as a pointwise residual
on manufactured states, never solved as an initial-value problem.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import _kernels
from . import calculus as ca
from .constitutive import ConstitutiveSet, ScalarLaw
from .errors import (
    CFLViolation,
    InsufficientTimeLevels,
    NonpositiveDensity,
    NonpositiveThermo,
)
from .fields import GridField, as_values
from .geometry import SurfaceGeometry
from .quadrature import QuadratureRule, surface_integral, surface_integral_vector

GeoProvider = Union[SurfaceGeometry, Callable[[float], SurfaceGeometry]]

RK4_NODES = (0.0, 0.5, 0.5, 1.0)
RK4_WEIGHTS = (1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0)
RK4_REAL_AXIS = 2.78


@dataclass
class FluidState:
    """Sampled fluid fields on the parameter grid at one time."""

    rho: np.ndarray
    v: np.ndarray
    theta: Optional[np.ndarray] = None
    C: Optional[np.ndarray] = None
    sigma: Optional[np.ndarray] = None
    e: Optional[np.ndarray] = None
    F: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None  # entropy, used by the thermodynamic audits

    def __post_init__(self):
        self.rho = as_values(self.rho)
        self.v = as_values(self.v)
        for name in ("theta", "C", "sigma", "e", "F", "s"):
            val = getattr(self, name)
            if val is not None:
                setattr(self, name, as_values(val))

    def tangency_defect(self, geo):
        return float(np.max(np.abs(np.einsum("i...,i...->...", geo.n, self.v))))


def _geo_at(geo: GeoProvider, t: float) -> SurfaceGeometry:
    return geo(t) if callable(geo) else geo


def _boundary_mask(grid):
    mask = np.zeros(grid.shape, dtype=bool)
    for seg in grid.boundary_segments():
        mask[grid.segment_nodes(seg)] = True
    return mask


def _project_and_clamp(v, geo, mask, bc):
    v = np.einsum("ij...,j...->i...", geo.P, v)
    if bc == "no-slip" and mask is not None:
        v[:, mask] = 0.0
    return v


def _flux_divergence(flux1, flux2, grid):
    """Divergence of a parameter flux with the telescoping boundary closure."""
    d1 = _kernels.diff1(flux1, 0, grid.h1, 2, False, True)
    d2 = _kernels.diff1(flux2, 1, grid.h2, 2, grid.periodic2, not grid.periodic2)
    return d1 + d2


def wave_speed_bound(state: FluidState, geo: SurfaceGeometry,
                     pressure: ScalarLaw) -> float:
    """Max acoustic-plus-advective speed for the explicit step."""
    rho = state.rho
    # d/drho of the effective pressure equals rho p''(rho); estimate centrally
    d = 1e-6 * max(1.0, float(np.max(np.abs(rho))))

    def peff(r):
        return r * pressure.d(r) - pressure(r)

    dpeff = (peff(rho + d) - peff(rho - d)) / (2 * d)
    c = np.sqrt(np.maximum(dpeff, 0.0))
    u = state.v - geo.v
    return float(np.max(c + np.sqrt(np.einsum("i...,i...->...", u, u))))


def min_physical_spacing(geo: SurfaceGeometry) -> float:
    g = geo.grid
    s1 = np.sqrt(np.einsum("i...,i...->...", geo.g1, geo.g1)) * g.h1
    s2 = np.sqrt(np.einsum("i...,i...->...", geo.g2, geo.g2)) * g.h2
    return float(min(np.min(s1), np.min(s2)))


def stable_dt_barotropic(state, geo, pressure, cfl=0.4):
    return cfl * min_physical_spacing(geo) / max(wave_speed_bound(state, geo, pressure), 1e-14)


def step_tangential_barotropic(state: FluidState, geo: GeoProvider,
                               pressure: ScalarLaw, dt: float, t: float = 0.0,
                               bc: str = "no-slip", cfl: float = 0.4,
                               check_cfl: bool = True) -> FluidState:
    """One explicit RK4 step of the tangential barotropic system.

    The surface must be stationary or moving tangentially; the velocity is
    re-projected onto the tangent plane and zeroed on the boundary (no-slip)
    after every stage.  Density positivity is enforced before and after.
    """
    if bc not in ("no-slip", "none"):
        raise ValueError(f"unsupported boundary condition {bc!r}")
    if float(np.min(state.rho)) <= 0.0:
        raise NonpositiveDensity("density must be positive to take a step")
    geo0 = _geo_at(geo, t)
    if check_cfl:
        dt_max = stable_dt_barotropic(state, geo0, pressure, cfl)
        if dt > dt_max * (1.0 + 1e-12):
            raise CFLViolation(f"dt = {dt:.3e} exceeds stable bound {dt_max:.3e}")
    grid = geo0.grid
    mask = _boundary_mask(grid) if bc == "no-slip" else None

    # the conserved variable rho * sqrtG absorbs surface dilution, so the
    # flux-divergence rate keeps the discrete total exact under no-slip
    def rhs(rho, v, geo_s):
        sqrtG = geo_s.sqrtG
        u = v - geo_s.v
        u1 = np.einsum("i...,i...->...", u, geo_s.gu1)
        u2 = np.einsum("i...,i...->...", u, geo_s.gu2)
        q_dot = -_flux_divergence(sqrtG * rho * u1, sqrtG * rho * u2, grid)
        peff = rho * pressure.d(rho) - pressure(rho)
        grad_p = ca.surface_gradient(peff, geo_s).values
        adv = u1 * geo_s._grid_d(v, 0) + u2 * geo_s._grid_d(v, 1)
        v_dot = -grad_p / rho - adv
        return q_dot, v_dot

    Q0, v0 = state.rho * geo0.sqrtG, state.v
    k_Q, k_v = [], []
    for stage, cnode in enumerate(RK4_NODES):
        ts = t + cnode * dt
        geo_s = _geo_at(geo, ts)
        if stage == 0:
            rho_s, v_s = state.rho, v0
        else:
            rho_s = (Q0 + dt * cnode * k_Q[stage - 1]) / geo_s.sqrtG
            v_s = v0 + dt * cnode * k_v[stage - 1]
            v_s = _project_and_clamp(v_s, geo_s, mask, bc)
        kq, kv = rhs(rho_s, v_s, geo_s)
        k_Q.append(kq)
        k_v.append(kv)
    geo1 = _geo_at(geo, t + dt)
    rho_new = (Q0 + dt * sum(w * k for w, k in zip(RK4_WEIGHTS, k_Q))) / geo1.sqrtG
    v_new = v0 + dt * sum(w * k for w, k in zip(RK4_WEIGHTS, k_v))
    v_new = _project_and_clamp(v_new, geo1, mask, bc)
    if float(np.min(rho_new)) <= 0.0:
        raise NonpositiveDensity("density lost positivity during the step")
    return replace(state, rho=rho_new, v=v_new)


# --- surface diffusion -------------------------------------------------------


def _diffusion_flux_form(C, geo, cs: ConstitutiveSet):
    """sqrtG div(q_C) as an exact flux divergence (zero-flux boundary built in)."""
    grid = geo.grid
    grad = ca.surface_gradient(C, geo).values
    kappa = cs.e4.d(np.einsum("i...,i...->...", grad, grad))
    w = kappa * geo.sqrtG
    a11 = w * geo.ginv[0, 0]
    a22 = w * geo.ginv[1, 1]
    out = (_kernels.compact_flux_div(a11, C, 0, grid.h1, False)
           + _kernels.compact_flux_div(a22, C, 1, grid.h2, grid.periodic2))
    g12 = geo.ginv[0, 1]
    if float(np.max(np.abs(g12))) > 1e-14:
        b = w * g12
        d2C = geo._grid_d(C, 1)
        d1C = geo._grid_d(C, 0)
        out = out + geo._grid_d(b * d2C, 0) + geo._grid_d(b * d1C, 1)
    return out


def stable_dt_diffusion(C, geo, cs: ConstitutiveSet, cfl=0.4):
    grad = ca.surface_gradient(C, geo).values
    kappa = float(np.max(cs.e4.d(np.einsum("i...,i...->...", grad, grad))))
    grid = geo.grid
    lam = 4.0 * kappa * float(np.max(geo.ginv[0, 0])) / grid.h1**2 \
        + 4.0 * kappa * float(np.max(geo.ginv[1, 1])) / grid.h2**2
    return cfl * RK4_REAL_AXIS / max(lam, 1e-14)


def step_surface_diffusion(C, geo: GeoProvider, cs: ConstitutiveSet, dt: float,
                           t: float = 0.0, bc: str = "zero-flux",
                           cfl: float = 0.4, check_cfl: bool = True):
    """One explicit RK4 step of the surface concentration equation.

    The surface motion enters through the geometry provider (the transport
    velocity is the motion of the parametrization); dilution by surface
    stretching is handled by stepping the conserved density C sqrtG, whose
    rate is the flux-form diffusion operator.  The zero co-normal-flux wall
    condition (the only supported one) is built into the flux reflection, so
    the total amount is conserved to rounding on orthogonal charts.
    """
    if bc != "zero-flux":
        raise ValueError(f"unsupported boundary condition {bc!r}")
    Cv = as_values(C)
    geo0 = _geo_at(geo, t)
    if check_cfl:
        dt_max = stable_dt_diffusion(Cv, geo0, cs, cfl)
        if dt > dt_max * (1.0 + 1e-12):
            raise CFLViolation(f"dt = {dt:.3e} exceeds stable bound {dt_max:.3e}")
    Q0 = Cv * geo0.sqrtG
    k_list = []
    for stage, cnode in enumerate(RK4_NODES):
        ts = t + cnode * dt
        geo_s = _geo_at(geo, ts)
        Q_s = Q0 if stage == 0 else Q0 + dt * cnode * k_list[stage - 1]
        C_s = Q_s / geo_s.sqrtG
        k_list.append(_diffusion_flux_form(C_s, geo_s, cs))
    Q1 = Q0 + dt * sum(w * k for w, k in zip(RK4_WEIGHTS, k_list))
    geo1 = _geo_at(geo, t + dt)
    return Q1 / geo1.sqrtG


# --- residual evaluators ------------------------------------------------------


def _heat_flux(theta, geo, cs):
    grad = ca.surface_gradient(theta, geo).values
    return cs.e3.d(np.einsum("i...,i...->...", grad, grad)) * grad


def _species_flux(C, geo, cs):
    grad = ca.surface_gradient(C, geo).values
    return cs.e4.d(np.einsum("i...,i...->...", grad, grad)) * grad


def _lagrangian_rate(values, dt):
    return (values[2] - values[0]) / (2.0 * dt)


@dataclass
class SystemResiduals:
    """Pointwise residual fields of the two forms of the full system."""

    mass: GridField
    momentum: GridField
    energy: GridField
    concentration: GridField
    mass_cons: GridField
    momentum_cons: GridField
    energy_cons: GridField
    concentration_cons: GridField

    def summary(self, geo, rule: QuadratureRule = QuadratureRule()):
        """(L-inf, L2) norms per residual field."""
        out = {}
        for name in ("mass", "momentum", "energy", "concentration",
                     "mass_cons", "momentum_cons", "energy_cons",
                     "concentration_cons"):
            vals = getattr(self, name).values
            sq = vals**2 if vals.ndim == 2 else np.einsum("i...,i...->...", vals, vals)
            out[name] = (float(np.max(np.abs(vals))),
                         float(np.sqrt(surface_integral(sq, geo, rule))))
        return out


def residual_generalized_system(states: Sequence[FluidState],
                                geos: Sequence[SurfaceGeometry],
                                cs: ConstitutiveSet) -> SystemResiduals:
    """Residuals of the full system and its conservative form.

    ``states`` hold the manufactured fields sampled along the flow map at
    three uniformly spaced times; material rates are centered differences at
    the middle level and all spatial terms are evaluated there.  The motion
    of the parametrization must be the full material velocity (states carry
    v equal to the flow-map velocity), which is what sampling along the flow
    map means.
    """
    if len(states) != 3 or len(geos) != 3:
        raise InsufficientTimeLevels("need exactly three time levels")
    t_prev, t_mid, t_next = (g.t for g in geos)
    dt = 0.5 * (t_next - t_prev)
    if not np.isclose(t_next - t_mid, t_mid - t_prev):
        raise ValueError("time levels must be uniformly spaced")
    st = states[1]
    geo = geos[1]
    rho, v = st.rho, st.v
    div_v = ca.surface_divergence(v, geo).values
    S = ca.stress_tensor(v, st.sigma, geo, cs).values
    div_S = ca.tensor_divergence(S, geo).values
    q_theta = _heat_flux(st.theta, geo, cs)
    q_C = _species_flux(st.C, geo, cs)
    e_diss = ca.dissipation_density(v, geo, cs).values
    F = st.F if st.F is not None else np.zeros_like(v)

    dt_rho = _lagrangian_rate([s.rho for s in states], dt)
    dt_v = _lagrangian_rate([s.v for s in states], dt)
    dt_e = _lagrangian_rate([s.e for s in states], dt)
    dt_C = _lagrangian_rate([s.C for s in states], dt)

    r_mass = dt_rho + div_v * rho
    r_mom = rho * dt_v - div_S - rho * F
    r_en = rho * dt_e + div_v * st.sigma \
        - ca.surface_divergence(q_theta, geo).values - e_diss
    r_conc = dt_C + div_v * st.C - ca.surface_divergence(q_C, geo).values

    # conservative form: material-normal rates plus full flux divergences
    def dtn(series, mid_values):
        return _lagrangian_rate(series, dt) - ca.advect(mid_values, v, geo)

    rho_series = [s.rho for s in states]
    rhov_series = [s.rho * s.v for s in states]
    eA_series = [0.5 * s.rho * np.einsum("i...,i...->...", s.v, s.v) + s.rho * s.e
                 for s in states]
    C_series = [s.C for s in states]

    R_mass = dtn(rho_series, rho) + ca.surface_divergence(rho * v, geo).values
    mom_flux = np.einsum("i...,j...->ij...", rho * v, v) - S
    R_mom = dtn(rhov_series, rho * v) + ca.tensor_divergence(mom_flux, geo).values \
        - rho * F
    eA = eA_series[1]
    Sv = np.einsum("ij...,j...->i...", S, v)
    R_en = dtn(eA_series, eA) \
        + ca.surface_divergence(eA * v - q_theta - Sv, geo).values \
        - rho * np.einsum("i...,i...->...", F, v)
    R_conc = dtn(C_series, C_series[1]) \
        + ca.surface_divergence(st.C * v - q_C, geo).values

    return SystemResiduals(
        mass=GridField(r_mass, "scalar"),
        momentum=GridField(r_mom, "vector"),
        energy=GridField(r_en, "scalar"),
        concentration=GridField(r_conc, "scalar"),
        mass_cons=GridField(R_mass, "scalar"),
        momentum_cons=GridField(R_mom, "vector"),
        energy_cons=GridField(R_en, "scalar"),
        concentration_cons=GridField(R_conc, "scalar"),
    )


@dataclass
class ThermoResiduals:
    enthalpy: GridField
    entropy: GridField
    free_energy: GridField
    entropy_production: GridField  # nonnegative for dissipative sets


def residual_thermodynamics(states: Sequence[FluidState],
                            geos: Sequence[SurfaceGeometry],
                            cs: ConstitutiveSet) -> ThermoResiduals:
    """Residuals of the enthalpy, entropy and free-energy balances.

    The entropy field must be supplied on the states; the enthalpy and free
    energy are formed from (e, sigma, rho, theta, s).  Also returns the
    pointwise entropy-production density, which is nonnegative whenever the
    constitutive derivatives are.
    """
    if len(states) != 3 or len(geos) != 3:
        raise InsufficientTimeLevels("need exactly three time levels")
    st = states[1]
    geo = geos[1]
    if float(np.min(st.rho)) <= 0.0 or float(np.min(st.theta)) <= 0.0:
        raise NonpositiveThermo("density and temperature must be positive")
    dt = 0.5 * (geos[2].t - geos[0].t)
    rho, theta = st.rho, st.theta
    q_theta = _heat_flux(theta, geo, cs)
    div_q = ca.surface_divergence(q_theta, geo).values
    e_diss = ca.dissipation_density(st.v, geo, cs).values

    h_series = [s.e + s.sigma / s.rho for s in states]
    ef_series = [s.e - s.theta * s.s for s in states]
    dt_h = _lagrangian_rate(h_series, dt)
    dt_s = _lagrangian_rate([s.s for s in states], dt)
    dt_sigma = _lagrangian_rate([s.sigma for s in states], dt)
    dt_theta = _lagrangian_rate([s.theta for s in states], dt)
    dt_ef = _lagrangian_rate(ef_series, dt)

    r_h = rho * dt_h - div_q - e_diss - dt_sigma
    r_s = theta * rho * dt_s - div_q - e_diss

    S = ca.stress_tensor(st.v, st.sigma, geo, cs).values
    D = ca.stretching_tensor(st.v, geo).values
    SD = np.einsum("ij...,ij...->...", S, D)
    r_f = rho * dt_ef + st.s * rho * dt_theta - SD + e_diss

    grad_t = ca.surface_gradient(theta, geo).values
    gsq = np.einsum("i...,i...->...", grad_t, grad_t)
    production = e_diss / theta + cs.e3.d(gsq) * gsq / theta**2

    return ThermoResiduals(
        enthalpy=GridField(r_h, "scalar"),
        entropy=GridField(r_s, "scalar"),
        free_energy=GridField(r_f, "scalar"),
        entropy_production=GridField(production, "scalar"),
    )


# --- balance reporting --------------------------------------------------------


@dataclass
class BalanceReport:
    """Quadrature time series of the conserved quantities and the energy law."""

    times: np.ndarray
    mass: np.ndarray
    momentum: np.ndarray         # (N, 3)
    angular: np.ndarray          # (N, 3)
    total_energy: np.ndarray
    concentration: np.ndarray
    kinetic: np.ndarray
    work_rate: np.ndarray
    dissipation_rate: np.ndarray
    energy_residual: np.ndarray
    bc_mode: str = "no-slip"

    @classmethod
    def empty(cls, bc_mode="no-slip"):
        z = np.zeros((0,))
        return cls(z, z.copy(), np.zeros((0, 3)), np.zeros((0, 3)), z.copy(),
                   z.copy(), z.copy(), z.copy(), z.copy(), z.copy(), bc_mode)


class BalanceRecorder:
    """Accumulates the balance series step by step during a run."""

    def __init__(self, rule: QuadratureRule = QuadratureRule(),
                 pressure: Optional[ScalarLaw] = None, bc_mode: str = "no-slip"):
        self.rule = rule
        self.pressure = pressure
        self.bc_mode = bc_mode
        self.rows = []

    def record(self, t: float, state: FluidState, geo: SurfaceGeometry,
               cs: Optional[ConstitutiveSet] = None):
        rule = self.rule
        rho, v = state.rho, state.v
        vsq = np.einsum("i...,i...->...", v, v)
        mass = surface_integral(rho, geo, rule)
        mom = surface_integral_vector(rho * v, geo, rule)
        xcv = np.stack([
            geo.x[1] * rho * v[2] - geo.x[2] * rho * v[1],
            geo.x[2] * rho * v[0] - geo.x[0] * rho * v[2],
            geo.x[0] * rho * v[1] - geo.x[1] * rho * v[0],
        ])
        ang = surface_integral_vector(xcv, geo, rule)
        kin = surface_integral(0.5 * rho * vsq, geo, rule)
        div_v = ca.surface_divergence(v, geo).values
        if self.pressure is not None:
            peff = rho * self.pressure.d(rho) - self.pressure(rho)
            work = surface_integral(div_v * peff, geo, rule)
            diss = 0.0
        elif cs is not None and state.sigma is not None:
            wk = div_v * state.sigma
            if state.F is not None:
                wk = wk + rho * np.einsum("i...,i...->...", state.F, v)
            work = surface_integral(wk, geo, rule)
            diss = surface_integral(ca.dissipation_density(v, geo, cs).values,
                                    geo, rule)
        else:
            work, diss = 0.0, 0.0
        e_tot = np.nan
        if state.e is not None:
            e_tot = surface_integral(0.5 * rho * vsq + rho * state.e, geo, rule)
        conc = np.nan
        if state.C is not None:
            conc = surface_integral(state.C, geo, rule)
        self.rows.append((t, mass, mom, ang, e_tot, conc, kin, work, diss))

    def report(self) -> BalanceReport:
        if not self.rows:
            return BalanceReport.empty(self.bc_mode)
        times = np.array([r[0] for r in self.rows])
        mass = np.array([r[1] for r in self.rows])
        mom = np.stack([r[2] for r in self.rows])
        ang = np.stack([r[3] for r in self.rows])
        e_tot = np.array([r[4] for r in self.rows])
        conc = np.array([r[5] for r in self.rows])
        kin = np.array([r[6] for r in self.rows])
        work = np.array([r[7] for r in self.rows])
        diss = np.array([r[8] for r in self.rows])
        # kinetic-energy law: K(t) + int dissipation = K(0) + int work
        resid = np.zeros_like(times)
        if len(times) > 1:
            acc_w = np.concatenate([[0.0], np.cumsum(
                0.5 * (work[1:] + work[:-1]) * np.diff(times))])
            acc_d = np.concatenate([[0.0], np.cumsum(
                0.5 * (diss[1:] + diss[:-1]) * np.diff(times))])
            resid = kin + acc_d - kin[0] - acc_w
        return BalanceReport(times, mass, mom, ang, e_tot, conc, kin, work,
                             diss, resid, self.bc_mode)


def balance_report(snapshots, bc_mode: str = "no-slip",
                   pressure: Optional[ScalarLaw] = None,
                   cs: Optional[ConstitutiveSet] = None,
                   rule: QuadratureRule = QuadratureRule()) -> BalanceReport:
    """Balance series from a sequence of (t, state, geometry) snapshots."""
    rec = BalanceRecorder(rule, pressure, bc_mode)
    for t, state, geo in snapshots:
        rec.record(t, state, geo, cs)
    return rec.report()


def stress_moment_integral(S, geo: SurfaceGeometry,
                           rule: QuadratureRule = QuadratureRule()) -> np.ndarray:
    """Integral of x cross (surface divergence of S); the torque of a stress.

    Vanishes for symmetric S that annihilates the normal and has zero
    co-normal trace on the boundary, which is the angular-momentum argument.
    """
    div_S = ca.tensor_divergence(as_values(S), geo).values
    x = geo.x
    moment = np.stack([
        x[1] * div_S[2] - x[2] * div_S[1],
        x[2] * div_S[0] - x[0] * div_S[2],
        x[0] * div_S[1] - x[1] * div_S[0],
    ])
    return surface_integral_vector(moment, geo, rule)


# --- run drivers ---------------------------------------------------------------


@dataclass
class RunResult:
    state: FluidState
    report: BalanceReport
    steps: int
    dt: float


def run_tangential_barotropic(geo: GeoProvider, state: FluidState,
                              pressure: ScalarLaw, t_final: float,
                              cfl: float = 0.4, bc: str = "no-slip",
                              rule: QuadratureRule = QuadratureRule(),
                              record_every: int = 1) -> RunResult:
    """March the tangential barotropic system to t_final with a fixed step.

    The step is chosen once from the initial state's stability bound and
    rounded down so the horizon is hit exactly.
    """
    geo0 = _geo_at(geo, 0.0)
    dt_bound = stable_dt_barotropic(state, geo0, pressure, cfl)
    steps = max(1, int(np.ceil(t_final / dt_bound)))
    dt = t_final / steps
    rec = BalanceRecorder(rule, pressure, bc)
    rec.record(0.0, state, geo0)
    t = 0.0
    for k in range(steps):
        state = step_tangential_barotropic(state, geo, pressure, dt, t, bc,
                                           cfl, check_cfl=False)
        t = (k + 1) * dt
        if (k + 1) % record_every == 0 or k + 1 == steps:
            rec.record(t, state, _geo_at(geo, t))
    return RunResult(state, rec.report(), steps, dt)


@dataclass
class DiffusionRunResult:
    C: np.ndarray
    times: np.ndarray
    totals: np.ndarray
    mode_amplitudes: Optional[np.ndarray]
    steps: int
    dt: float


def run_surface_diffusion(geo: GeoProvider, C0, cs: ConstitutiveSet,
                          t_final: float, cfl: float = 0.4,
                          rule: QuadratureRule = QuadratureRule(),
                          record_every: int = 1,
                          mode: Optional[np.ndarray] = None) -> DiffusionRunResult:
    """March the concentration equation, tracking the total and a mode amplitude.

    ``mode`` is an optional weighting field; its weighted surface integral is
    recorded at every sample, which the eigenmode decay-rate studies fit.
    """
    C = as_values(C0)
    geo0 = _geo_at(geo, 0.0)
    dt_bound = stable_dt_diffusion(C, geo0, cs, cfl)
    steps = max(1, int(np.ceil(t_final / dt_bound)))
    dt = t_final / steps
    times = [0.0]
    totals = [surface_integral(C, geo0, rule)]
    amps = None
    if mode is not None:
        amps = [surface_integral(C * mode, geo0, rule)]
    t = 0.0
    for k in range(steps):
        C = step_surface_diffusion(C, geo, cs, dt, t, cfl=cfl, check_cfl=False)
        t = (k + 1) * dt
        if (k + 1) % record_every == 0 or k + 1 == steps:
            geo_t = _geo_at(geo, t)
            times.append(t)
            totals.append(surface_integral(C, geo_t, rule))
            if amps is not None:
                amps.append(surface_integral(C * mode, geo_t, rule))
    return DiffusionRunResult(C, np.array(times), np.array(totals),
                              None if amps is None else np.array(amps),
                              steps, dt)
