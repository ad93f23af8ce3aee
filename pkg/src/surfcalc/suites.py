"""Verification suites: named checks run across a resolution ladder.

Each suite returns (rows, failures).  Rows carry the two sides of every
check; failures are human-readable strings produced when a declared
tolerance or convergence-order bound is missed.  The suites are the engine
behind both the command-line runner and the acceptance tests.
"""

import os

import numpy as np

from . import calculus as ca
from . import identities as idn
from . import solver as sv
from . import variational as va
from .constitutive import ConstitutiveSet, make_constitutive
from .fields import make_field
from .flowmap import Surface, make_surface, strip_derivatives
from .geometry import DiffConfig, SurfaceGeometry
from .domain import Grid
from .quadrature import QuadratureRule, surface_integral, surface_integral_vector
from .report import ReportRow, attach_orders, span_order
from .rng import Xoshiro256StarStar

DISK_MODE_RATE = 1.8411837813406593 ** 2  # squared first zero of J1'


def _row(name, check, dt=np.nan):
    return ReportRow(name, check.h, dt if not np.isnan(dt) else check.dt,
                     check.lhs, check.rhs, check.abs_residual, check.rel_residual)


def _span_orders(rows, failures, min_order, skip=(), exact_floor=1e-12):
    by_name = {}
    for row in rows:
        by_name.setdefault(row.name, []).append(row.abs_residual)
    for name, residuals in by_name.items():
        if name in skip or len(residuals) < 2:
            continue
        if max(residuals) < exact_floor:
            continue  # identity holds to rounding; no order to estimate
        order = span_order(residuals)
        if not (order >= min_order):
            failures.append(
                f"{name}: observed order {order:.2f} below {min_order}")
    return by_name


# --- geometry ----------------------------------------------------------------


def geometry_suite(surface: Surface, resolutions, t=0.0, min_order=1.9,
                   curvature_reference=None, tol_exact=1e-12):
    """Pointwise geometric invariants plus a curvature convergence study.

    The convergence study evaluates the chart in finite-difference mode so
    the curvature error scales with the grid; analytic mode is held to the
    rounding tolerance instead.
    """
    rows, failures = [], []
    fd_spec = strip_derivatives(surface.spec)
    for res in resolutions:
        grid = Grid(surface.domain, res)
        geo = SurfaceGeometry(surface.spec, grid, t)
        p2, pn, tr = geo.projection_defect()
        det = geo.determinant_consistency()
        for name, val in (("projection-idempotent", p2), ("projection-normal", pn),
                          ("projection-trace", tr), ("determinant-two-ways", det)):
            rows.append(ReportRow(name, grid.h_max, np.nan, val, 0.0, val, val))
            if val > tol_exact:
                failures.append(f"{name}: defect {val:.2e} above {tol_exact:.0e}")
        if curvature_reference is not None:
            geo_fd = SurfaceGeometry(fd_spec, grid, t)
            err = float(np.max(np.abs(geo_fd.H - curvature_reference)))
            rows.append(ReportRow("curvature-error", grid.h_max, np.nan,
                                  err, 0.0, err, err))
            exact_err = float(np.max(np.abs(geo.H - curvature_reference)))
            rows.append(ReportRow("curvature-analytic", grid.h_max, np.nan,
                                  exact_err, 0.0, exact_err, exact_err))
            if exact_err > 1e-10:
                failures.append(f"analytic curvature off by {exact_err:.2e}")
    _span_orders(rows, failures, min_order,
                 skip=("projection-idempotent", "projection-normal",
                       "projection-trace", "determinant-two-ways",
                       "curvature-analytic"))
    return attach_orders(rows), failures


# --- identities ---------------------------------------------------------------


DEFAULT_IDENTITY_FIELDS = {
    "theta": {"name": "coord-z"},
    "conc": {"name": "linear", "params": {"a": 0.5, "b": 0.3, "c": 0.0,
                                          "offset": 0.2}},
    "sigma": {"name": "linear", "params": {"a": 0.25, "offset": 1.0}},
}


def identities_suite(surface: Surface, cs: ConstitutiveSet, resolutions, t=0.5,
                     rule: QuadratureRule = QuadratureRule(),
                     min_order=1.9, tol_rel=1e-3, dt_factor=0.25, seed=2024,
                     diff: DiffConfig = DiffConfig(), fields=None):
    """Energy representations, divergence theorem, parts and transport checks.

    ``fields`` optionally picks the sampled scalars from the field catalog,
    e.g. ``{"theta": {"name": "coord-z"}}``; gradients must be closed form.
    """
    rows, failures = [], []
    spec_map = dict(DEFAULT_IDENTITY_FIELDS)
    spec_map.update(fields or {})
    theta = make_field(spec_map["theta"]["name"],
                       spec_map["theta"].get("params"))
    conc = make_field(spec_map["conc"]["name"], spec_map["conc"].get("params"))
    sigma = make_field(spec_map["sigma"]["name"],
                       spec_map["sigma"].get("params"))
    rng = Xoshiro256StarStar(seed)
    coeffs = rng.uniforms(30, -1.0, 1.0)

    def poly(x, y, z, k):
        b = coeffs[10 * k:10 * k + 10]
        return (b[0] + b[1] * x + b[2] * y + b[3] * z + b[4] * x * y
                + b[5] * y * z + b[6] * x * z + b[7] * x * x + b[8] * y * y
                + b[9] * z * z)

    finest = max(resolutions)
    for res in resolutions:
        grid = Grid(surface.domain, res)
        geo = SurfaceGeometry(surface.spec, grid, t, diff)
        for chk in idn.check_energy_representations(
                geo, cs, sigma.sample(geo).values, theta.sample(geo).values,
                conc.sample(geo).values,
                theta_partials=theta.chart_partials(geo),
                conc_partials=conc.chart_partials(geo), rule=rule):
            rows.append(_row(chk.name, chk))
            if res == finest and chk.rel_residual > tol_rel:
                failures.append(
                    f"{chk.name}: relative residual {chk.rel_residual:.2e} "
                    f"above {tol_rel:.0e} at {res}")
        x, y, z = geo.x
        phi = np.stack([poly(x, y, z, k) for k in range(3)])
        rows.append(_row("divergence-random", idn.check_divergence_theorem(phi, geo, rule)))
        f = 0.5 + 0.3 * x + 0.2 * y * z
        gfun = 1.0 + 0.4 * z + 0.1 * x * y
        rows.append(_row("parts-j2", idn.check_integration_by_parts(f, gfun, 2, geo, rule)))
        dt = dt_factor * grid.h_max
        times = (t - dt, t, t + dt)
        geos = [SurfaceGeometry(surface.spec, grid, tk, diff) for tk in times]
        fser = [1.0 + 0.2 * gk.x[0] + 0.1 * gk.x[2] ** 2 for gk in geos]
        rows.append(_row("transport-theorem",
                         idn.check_transport_theorem(fser, geos, rule), dt))
    _span_orders(rows, failures, min_order)
    return attach_orders(rows), failures


def hemisphere_divergence_suite(resolutions, tol_const=1e-6, min_order=1.9,
                                theta_min=0.2, seed=11):
    """Divergence theorem on the hemisphere cap: exact cancellation and order."""
    rows, failures = [], []
    surface = make_surface("sphere-cap",
                           {"theta_min": theta_min, "theta_max": float(np.pi / 2)})
    simpson = QuadratureRule("simpson")
    trap = QuadratureRule()
    rng = Xoshiro256StarStar(seed)
    cvec = [rng.uniform(0.2, 1.0) for _ in range(3)]
    coeffs = rng.uniforms(30, -1.0, 1.0)

    def poly(x, y, z, k):
        b = coeffs[10 * k:10 * k + 10]
        return (b[0] + b[1] * x + b[2] * y + b[3] * z + b[4] * x * y
                + b[5] * y * z + b[6] * x * z + b[7] * x * x + b[8] * y * y
                + b[9] * z * z)

    finest = max(resolutions)
    for res in resolutions:
        grid = Grid(surface.domain, res)
        geo = SurfaceGeometry(surface.spec, grid, 0.0)
        const = np.zeros((3,) + grid.shape)
        for i in range(3):
            const[i] = cvec[i]
        chk = idn.check_divergence_theorem(const, geo, simpson)
        rows.append(_row("divergence-constant", chk))
        if res == finest and chk.rel_residual > tol_const:
            failures.append(
                f"divergence-constant: {chk.rel_residual:.2e} above {tol_const:.0e}")
        x, y, z = geo.x
        phi = np.stack([poly(x, y, z, k) for k in range(3)])
        rows.append(_row("divergence-smooth", idn.check_divergence_theorem(phi, geo, trap)))
    _span_orders(rows, failures, min_order, skip=("divergence-constant",))
    return attach_orders(rows), failures


# --- variational ---------------------------------------------------------------


class _PairingState:
    def __init__(self, geo):
        x, y, z = geo.x
        self.v = geo.v
        self.sigma = 1.0 + 0.25 * x
        self.rho = 1.0 + 0.1 * y + 0.0 * x
        self.theta = z + 0.0 * x
        self.C = 0.2 + 0.5 * x + 0.3 * y
        self.F = np.stack([0.1 + 0.0 * x, 0.0 * x, -0.05 + 0.0 * x])


def variational_suite(surface: Surface, cs: ConstitutiveSet, resolutions, t=0.5,
                      n_directions=5, seed=20240, tol_rel=1e-3, min_order=1.9,
                      eps_list=va.DEFAULT_EPS_LADDER,
                      diff: DiffConfig = DiffConfig(order=4),
                      rule: QuadratureRule = QuadratureRule()):
    """Gateaux-vs-force pairings for all four energies, plain and tangential."""
    rows, failures = [], []
    finest = max(resolutions)
    for res in resolutions:
        grid = Grid(surface.domain, res)
        geo = SurfaceGeometry(surface.spec, grid, t, diff)
        state = _PairingState(geo)
        rng = Xoshiro256StarStar(seed)
        for which, kind in (("dissipation", "velocity"), ("work", "velocity"),
                            ("thermal", "scalar"), ("species", "scalar")):
            variants = (False, True) if kind == "velocity" else (False,)
            for tangential in variants:
                for j in range(n_directions):
                    d = va.random_direction(geo, rng, kind, tangential=tangential)
                    chk = va.check_force_pairing(which, state, geo, cs, d,
                                                 eps_list, rule, tangential)
                    name = f"{chk.name}-{j}"
                    rows.append(_row(name, chk))
                    scale = max(abs(chk.lhs), abs(chk.rhs), 1.0)
                    if res == finest and chk.abs_residual / scale > tol_rel:
                        failures.append(
                            f"{name}: scaled residual "
                            f"{chk.abs_residual / scale:.2e} above {tol_rel:.0e}")
    _span_orders(rows, failures, min_order)
    return attach_orders(rows), failures


def action_suite(surface: Surface, cs: ConstitutiveSet, ladder=None,
                 window=0.4, min_order=1.9, mass_tol_moving=1e-6,
                 rule: QuadratureRule = QuadratureRule()):
    """Flow-map variation of the action plus transported-mass conservation.

    ``ladder`` holds (resolution, time levels, eps pair) triples refined
    together; the residual must drop at the declared order under the joint
    refinement.
    """
    rows, failures = [], []
    ladder = ladder or ((16, 8, (2e-2, 1e-2)), (32, 16, (1e-2, 5e-3)),
                        (64, 32, (5e-3, 2.5e-3)))
    for which in ("inertia", "barotropic"):
        for res, nt, eps_pair in ladder:
            grid = Grid(surface.domain, res)
            pert = va.bump_perturbation(grid, direction=(0.2, 0.1, 0.5),
                                        window=window)
            geo0 = SurfaceGeometry(surface.spec, grid, 0.0)
            rho0 = 1.0 + 0.2 * geo0.x[2]
            chk = va.check_action_variation(surface.spec, grid, pert, rho0, cs,
                                            which, t_final=window, nt=nt,
                                            eps_list=eps_pair, rule=rule)
            rows.append(_row(chk.name, chk))
    res, nt, _ = ladder[-1]
    grid = Grid(surface.domain, res)
    pert = va.bump_perturbation(grid, direction=(0.2, 0.1, 0.5), window=window)
    geos = [SurfaceGeometry(surface.spec, grid, tk)
            for tk in np.linspace(0.0, window, 5)]
    chk = va.check_domain_variation(geos[2], pert)
    rows.append(_row("domain-variation", chk))
    rho0 = 1.0 + 0.2 * geos[0].x[2]
    rhos = va.density_transport(rho0, geos)
    masses = [surface_integral(r, g, rule) for r, g in zip(rhos, geos)]
    drift = max(abs(m - masses[0]) for m in masses) / abs(masses[0])
    rows.append(ReportRow("transported-mass-drift", grid.h_max, np.nan,
                          max(masses), min(masses), drift, drift))
    if drift > mass_tol_moving:
        failures.append(f"transported-mass-drift {drift:.2e} above {mass_tol_moving:.0e}")
    _span_orders(rows, failures, min_order,
                 skip=("domain-variation", "transported-mass-drift"))
    return attach_orders(rows), failures


# --- solver --------------------------------------------------------------------


def barotropic_suite(resolutions, t_final=1.0, cfl=0.4, mass_tol=1e-6,
                     min_order=1.9, inner_radius=0.2, amplitude=1e-3,
                     record_every=4, balance_dir=None):
    """Acoustic pulse on the stationary flat annulus: mass and energy law.

    With ``balance_dir`` set, the full balance time series of each run is
    written there as one CSV per resolution.
    """
    from .constitutive import pressure_quadratic
    from .report import write_balance_csv

    rows, failures = [], []
    surface = make_surface("flat-disk", {"inner_radius": inner_radius})
    pressure = pressure_quadratic()
    finest = max(resolutions)
    for res in resolutions:
        grid = Grid(surface.domain, res)
        geo = SurfaceGeometry(surface.spec, grid, 0.0)
        rho0 = make_field("radial-gauss", {"amplitude": amplitude}).sample(geo).values
        state = sv.FluidState(rho=rho0, v=np.zeros((3,) + grid.shape))
        out = sv.run_tangential_barotropic(geo, state, pressure, t_final,
                                           cfl=cfl, record_every=record_every)
        rep = out.report
        if balance_dir is not None:
            write_balance_csv(
                os.path.join(balance_dir, f"balance_barotropic_{res}.csv"), rep)
        drift = float(np.max(np.abs(rep.mass - rep.mass[0])) / abs(rep.mass[0]))
        rows.append(ReportRow("mass-drift", grid.h_max, out.dt, rep.mass[0],
                              rep.mass[-1], drift, drift))
        eres = float(np.max(np.abs(rep.energy_residual)))
        rows.append(ReportRow("energy-law-residual", grid.h_max, out.dt,
                              rep.kinetic[-1], rep.kinetic[-1] - eres, eres, eres))
        tang = out.state.tangency_defect(geo)
        rows.append(ReportRow("velocity-tangency", grid.h_max, out.dt,
                              tang, 0.0, tang, tang))
        if tang > 1e-12:
            failures.append(f"velocity tangency defect {tang:.2e} at {res}")
        if res == finest and drift > mass_tol:
            failures.append(f"mass drift {drift:.2e} above {mass_tol:.0e}")
    _span_orders(rows, failures, min_order,
                 skip=("mass-drift", "velocity-tangency"))
    return attach_orders(rows), failures


def diffusion_suite(resolutions, rate_tol=0.01, conserve_tol=1e-8,
                    inner_radius=0.02, steps=2000, record_every=100):
    """Disk eigenmode decay rate and exact total conservation."""
    rows, failures = [], []
    cs = make_constitutive("newtonian")
    surface = make_surface("flat-disk", {"inner_radius": inner_radius})
    finest = max(resolutions)
    for res in resolutions:
        grid = Grid(surface.domain, res)
        geo = SurfaceGeometry(surface.spec, grid, 0.0)
        mode = make_field("disk-mode").sample(geo).values
        C0 = 1.0 + 0.1 * mode
        dt_bound = sv.stable_dt_diffusion(C0, geo, cs)
        out = sv.run_surface_diffusion(geo, C0, cs, steps * dt_bound,
                                       record_every=record_every, mode=mode)
        lam = -np.polyfit(out.times, np.log(out.mode_amplitudes), 1)[0]
        err = abs(lam - DISK_MODE_RATE) / DISK_MODE_RATE
        rows.append(ReportRow("diffusion-decay-rate", grid.h_max, out.dt,
                              lam, DISK_MODE_RATE, abs(lam - DISK_MODE_RATE), err))
        drift = float(np.max(np.abs(out.totals - out.totals[0]))
                      / abs(out.totals[0]))
        rows.append(ReportRow("diffusion-conservation", grid.h_max, out.dt,
                              out.totals[0], out.totals[-1], drift, drift))
        if res == finest and err > rate_tol:
            failures.append(f"decay-rate error {err:.2%} above {rate_tol:.0%}")
        if drift > conserve_tol:
            failures.append(f"diffusion conservation drift {drift:.2e} at {res}")
    return attach_orders(rows), failures


# --- conservation audit ----------------------------------------------------------


def _bump_stress(geo, rng):
    """Symmetric tangential test stress vanishing on the boundary."""
    grid = geo.grid
    (a1, b1), (a2, b2) = grid.domain.bounds
    s1 = (grid.X1 - a1) / (b1 - a1)
    beta = (4.0 * s1 * (1.0 - s1)) ** 3
    if not grid.periodic2:
        s2 = (grid.X2 - a2) / (b2 - a2)
        beta = beta * (4.0 * s2 * (1.0 - s2)) ** 3
    x, y, z = geo.x
    A = np.zeros((3, 3) + grid.shape)
    for i in range(3):
        for j in range(i, 3):
            c0, c1, c2, c3 = (rng.uniform(-0.25, 0.25) for _ in range(4))
            A[i, j] = c0 + c1 * x + c2 * y + c3 * z
            A[j, i] = A[i, j]
    PAP = np.einsum("ik...,kl...,lj...->ij...", geo.P, A, geo.P)
    return beta * PAP


def conservation_suite(resolutions, window=0.4, nt=8, seed=77, min_order=1.9,
                       torque_tol=1e-3,
                       diff: DiffConfig = DiffConfig(order=4),
                       rule: QuadratureRule = QuadratureRule()):
    """Momentum and angular-momentum drift against their source integrals.

    The state rides an accelerating cap: density is transported, velocity is
    the flow velocity, the test stress is a boundary-vanishing symmetric
    tangential field, and the body force is defined pointwise so the momentum
    balance holds; the audit then checks that the quadrature drifts match the
    accumulated source to discretization order, which is exactly the
    boundary-term argument.  The torque rows check that the stress divergence
    carries no net moment.
    """
    rows, failures = [], []
    surface = make_surface("expanding-sphere-cap", {"rate": 0.6, "accel": 0.5})
    finest = max(resolutions)
    coarsest = min(resolutions)
    for res in resolutions:
        grid = Grid(surface.domain, res)
        nt_res = nt * (res // coarsest)  # refine the window with the grid
        times = np.linspace(0.0, window, nt_res + 1)
        geos = [SurfaceGeometry(surface.spec, grid, tk, diff) for tk in times]
        rng = Xoshiro256StarStar(seed)
        rho0 = 1.0 + 0.2 * geos[0].x[2]
        rhos = va.density_transport(rho0, geos)
        mom = []
        ang = []
        src_p = []
        src_L = []
        for geo, rho in zip(geos, rhos):
            S = _bump_stress(geo, Xoshiro256StarStar(seed))
            div_S = ca.tensor_divergence(S, geo).values
            rho_v = rho.values * geo.v
            accel = geo.accel
            rho_F = rho.values * accel - div_S  # rho F := rho Dt v - div S
            x = geo.x
            mom.append(surface_integral_vector(rho_v, geo, rule))
            ang.append(surface_integral_vector(np.stack([
                x[1] * rho_v[2] - x[2] * rho_v[1],
                x[2] * rho_v[0] - x[0] * rho_v[2],
                x[0] * rho_v[1] - x[1] * rho_v[0]]), geo, rule))
            src_p.append(surface_integral_vector(rho_F, geo, rule))
            src_L.append(surface_integral_vector(np.stack([
                x[1] * rho_F[2] - x[2] * rho_F[1],
                x[2] * rho_F[0] - x[0] * rho_F[2],
                x[0] * rho_F[1] - x[1] * rho_F[0]]), geo, rule))
            if geo is geos[len(geos) // 2]:
                torque = sv.stress_moment_integral(S, geo, rule)
                tmax = float(np.max(np.abs(torque)))
                rows.append(ReportRow("stress-torque", grid.h_max, np.nan,
                                      tmax, 0.0, tmax, tmax))
                if res == finest and tmax > torque_tol:
                    failures.append(
                        f"stress torque {tmax:.2e} above {torque_tol:.0e}")
        dt = times[1] - times[0]
        drift_p = mom[-1] - mom[0]
        drift_L = ang[-1] - ang[0]
        int_p = np.zeros(3)
        int_L = np.zeros(3)
        for k in range(nt_res):
            int_p += 0.5 * dt * (src_p[k] + src_p[k + 1])
            int_L += 0.5 * dt * (src_L[k] + src_L[k + 1])
        res_p = float(np.max(np.abs(drift_p - int_p)))
        res_L = float(np.max(np.abs(drift_L - int_L)))
        rows.append(ReportRow("momentum-balance", grid.h_max, dt,
                              float(np.max(np.abs(drift_p))),
                              float(np.max(np.abs(int_p))), res_p,
                              res_p / max(float(np.max(np.abs(drift_p))), 1.0)))
        rows.append(ReportRow("angular-balance", grid.h_max, dt,
                              float(np.max(np.abs(drift_L))),
                              float(np.max(np.abs(int_L))), res_L,
                              res_L / max(float(np.max(np.abs(drift_L))), 1.0)))
    _span_orders(rows, failures, min_order, skip=("stress-torque",))
    return attach_orders(rows), failures


# --- full-system residuals and thermodynamics -------------------------------------


def system_residual_suite(resolutions, dt_factor=0.25, min_order=1.9,
                          sigma_const=0.8, summary_dir=None,
                          rule: QuadratureRule = QuadratureRule()):
    """Manufactured-state residuals of the full system, both forms.

    On the translating disk every equation balances exactly in closed form,
    so the residual fields converge to zero; the stationary-cap case checks
    that the momentum residual reproduces the expected normal defect of the
    overdetermined system (the curvature force of a constant total pressure).
    With ``summary_dir`` set, per-resolution max and integral norms of every
    residual field are written there.
    """
    from .report import write_field_summary_csv

    rows, failures = [], []
    summary_entries = []
    cvec = (0.1, 0.0, 0.0)
    surface = make_surface("translating-disk", {"velocity": cvec})
    cs = make_constitutive("newtonian")

    def theta0(x, y):
        return 2.0 + 0.3 * x + x * x + y * y + 0.2 * x * y

    def lap_theta0(x, y):
        return 4.0 + 0.0 * x

    def conc0(x, y):
        return 1.0 + 0.2 * x + 0.5 * x * x + 0.3 * y * y

    def lap_conc0(x, y):
        return 1.6 + 0.0 * x

    def sigma0(x, y):
        return 1.0 + 0.2 * x + 0.1 * y * y

    def grad_sigma0(x, y):
        return np.stack([0.2 + 0.0 * x, 0.2 * y, 0.0 * x])

    for res in resolutions:
        grid = Grid(surface.domain, res)
        dt = dt_factor * grid.h_max
        times = (0.3 - dt, 0.3, 0.3 + dt)
        geos = [SurfaceGeometry(surface.spec, grid, tk) for tk in times]
        states = []
        x0, y0 = geos[0].x[0] - cvec[0] * times[0], geos[0].x[1] - cvec[1] * times[0]
        rho = 1.0 + 0.2 * x0 + 0.1 * y0
        for geo, tk in zip(geos, times):
            v = geo.v
            e = 1.0 + 0.1 * y0 + tk * lap_theta0(x0, y0) / rho
            C = conc0(x0, y0) + tk * lap_conc0(x0, y0)
            F = grad_sigma0(x0, y0) / rho
            th = theta0(x0, y0)
            states.append(sv.FluidState(rho=rho, v=v, theta=th, C=C,
                                        sigma=sigma0(x0, y0), e=e, F=F))
        res_fields = sv.residual_generalized_system(states, geos, cs)
        summary = res_fields.summary(geos[1], rule)
        for key, (linf_k, l2_k) in summary.items():
            summary_entries.append((f"translating-disk-{key}", grid.h_max, dt,
                                    linf_k, l2_k))
        # mass balances exactly here (constant samples); it converges in the
        # transported-density case below
        linf = summary["mass"][0]
        rows.append(ReportRow("system-mass-exact", grid.h_max, dt,
                              linf, 0.0, linf, linf))
        if linf > 1e-12:
            failures.append(f"translating-disk mass residual {linf:.2e}")
        for name in ("momentum", "energy", "concentration"):
            linf = summary[name][0]
            rows.append(ReportRow(f"system-{name}", grid.h_max, dt,
                                  linf, 0.0, linf, linf))
            linf_c = summary[name + "_cons"][0]
            rows.append(ReportRow(f"system-{name}-conservative", grid.h_max, dt,
                                  linf_c, 0.0, linf_c, linf_c))

    # transported density on the accelerating cap: converging continuity
    # residual and the two-form equivalence
    cap_acc = make_surface("expanding-sphere-cap", {"rate": 0.6, "accel": 0.5})
    for res in resolutions:
        grid = Grid(cap_acc.domain, res)
        dt = dt_factor * grid.h_max
        times = (0.3 - dt, 0.3, 0.3 + dt)
        geos = [SurfaceGeometry(cap_acc.spec, grid, tk) for tk in times]
        geo_ref = SurfaceGeometry(cap_acc.spec, grid, 0.0)
        rho0 = 1.0 + 0.2 * geo_ref.x[2]
        rhos = va.density_transport(rho0, geos, geo_ref)
        states = []
        for geo, rho_t in zip(geos, rhos):
            x, y, z = geo.x
            states.append(sv.FluidState(
                rho=rho_t.values, v=geo.v, theta=1.5 + 0.2 * x, C=1.0 + 0.1 * y,
                sigma=1.0 + 0.1 * z, e=1.0 + 0.2 * x))
        out = sv.residual_generalized_system(states, geos, cs)
        summary = out.summary(geos[1], rule)
        rows.append(ReportRow("system-mass-transport", grid.h_max, dt,
                              summary["mass"][0], 0.0, summary["mass"][0],
                              summary["mass"][0]))
        rows.append(ReportRow("system-mass-transport-conservative", grid.h_max,
                              dt, summary["mass_cons"][0], 0.0,
                              summary["mass_cons"][0], summary["mass_cons"][0]))
        # conservative-form residuals equal the advective ones plus
        # velocity-weighted lower balances; check the exact combinations
        st_mid = states[1]
        vmid = st_mid.v
        vsq = np.einsum("i...,i...->...", vmid, vmid)
        r_mass = out.mass.values
        r_mom = out.momentum.values
        combos = (
            ("mass", out.mass_cons.values - r_mass),
            ("momentum", out.momentum_cons.values - (r_mom + vmid * r_mass)),
            ("energy", out.energy_cons.values
             - (out.energy.values + (0.5 * vsq + st_mid.e) * r_mass
                + np.einsum("i...,i...->...", vmid, r_mom))),
            ("concentration",
             out.concentration_cons.values - out.concentration.values),
        )
        for name, gap_field in combos:
            gap = float(np.max(np.abs(gap_field)))
            rows.append(ReportRow(f"form-equivalence-{name}", grid.h_max, dt,
                                  gap, 0.0, gap, gap))
    # expected normal defect: constant total pressure on a stationary cap
    cap = make_surface("sphere-cap")
    for res in resolutions:
        grid = Grid(cap.domain, res)
        dt = dt_factor * grid.h_max
        geos = [SurfaceGeometry(cap.spec, grid, tk) for tk in (0.0, dt, 2 * dt)]
        zero_v = np.zeros((3,) + grid.shape)
        states = [sv.FluidState(rho=1.0 + 0.0 * g.x[0], v=zero_v,
                                theta=1.0 + 0.0 * g.x[0], C=1.0 + 0.0 * g.x[0],
                                sigma=sigma_const + 0.0 * g.x[0],
                                e=1.0 + 0.0 * g.x[0]) for g in geos]
        out = sv.residual_generalized_system(states, geos, cs)
        expected = sigma_const * geos[1].H * geos[1].n
        defect = float(np.max(np.abs(out.momentum.values - expected)))
        rows.append(ReportRow("overdetermined-normal-defect", grid.h_max, dt,
                              float(np.max(np.abs(out.momentum.values))),
                              float(np.max(np.abs(expected))), defect, defect))
    if summary_dir is not None:
        write_field_summary_csv(
            os.path.join(summary_dir, "system_residual_norms.csv"),
            summary_entries)
    _span_orders(rows, failures, min_order, skip=("system-mass-exact",))
    return attach_orders(rows), failures


def thermo_suite(resolutions, dt_factor=0.25, min_order=1.9,
                 production_floor=-1e-12, exact_tol=1e-10,
                 rule: QuadratureRule = QuadratureRule()):
    """Enthalpy/entropy/free-energy balances and the production sign audit."""
    rows, failures = [], []
    cs = make_constitutive("newtonian")
    disk = make_surface("flat-disk")
    for res in resolutions:
        grid = Grid(disk.domain, res)
        dt = dt_factor * grid.h_max
        times = (0.2 - dt, 0.2, 0.2 + dt)
        geos = [SurfaceGeometry(disk.spec, grid, tk) for tk in times]
        x, y = geos[1].x[0], geos[1].x[1]
        rho = 1.0 + 0.25 * x
        theta = 2.0 + x * x + y * y + 0.3 * x
        lap_q = 4.0 + 0.0 * x  # divergence of the linear-law heat flux
        rate_s = lap_q / (theta * rho)
        states = []
        for tk in times:
            s_t = 0.5 + 0.1 * y + tk * rate_s
            e_t = 1.0 + 0.2 * x + tk * lap_q / rho
            states.append(sv.FluidState(
                rho=rho, v=np.zeros((3,) + grid.shape), theta=theta,
                C=1.0 + 0.0 * x, sigma=1.0 + 0.1 * y, e=e_t, s=s_t))
        out = sv.residual_thermodynamics(states, geos, cs)
        for name, fieldv in (("enthalpy", out.enthalpy),
                             ("entropy", out.entropy)):
            linf = float(np.max(np.abs(fieldv.values)))
            rows.append(ReportRow(f"thermo-{name}", grid.h_max, dt,
                                  linf, 0.0, linf, linf))
        fe = float(np.max(np.abs(out.free_energy.values)))
        rows.append(ReportRow("thermo-free-energy-exact", grid.h_max, dt,
                              fe, 0.0, fe, fe))
        if fe > exact_tol:
            failures.append(f"free-energy residual {fe:.2e} above {exact_tol:.0e}")

    # transported-density free-energy balance on the accelerating cap
    cap = make_surface("expanding-sphere-cap", {"rate": 0.6, "accel": 0.5})
    for res in resolutions:
        grid = Grid(cap.domain, res)
        dt = dt_factor * grid.h_max
        times = (0.3 - dt, 0.3, 0.3 + dt)
        geos = [SurfaceGeometry(cap.spec, grid, tk) for tk in times]
        geo_ref = SurfaceGeometry(cap.spec, grid, 0.0)
        z0 = geo_ref.x[2]
        rho0 = 1.0 + 0.2 * z0
        theta0 = 1.5 + 0.2 * geo_ref.x[0]
        s0 = 0.5 + 0.1 * geo_ref.x[1]
        sigma0 = 1.0 + 0.1 * z0
        e0 = 1.0 + 0.2 * geo_ref.x[0]
        rhos = va.density_transport(rho0, geos, geo_ref)

        def a_of(tk):
            return 1.0 + 0.5 * tk * tk

        states = []
        for geo, tk, rho_t in zip(geos, times, rhos):
            s_t = s0 * a_of(tk)
            e_t = e0 + theta0 * s0 * (a_of(tk) - 1.0) \
                - sigma0 * (1.0 / rho_t.values - 1.0 / rho0)
            states.append(sv.FluidState(rho=rho_t.values, v=geo.v, theta=theta0,
                                        C=1.0 + 0.0 * z0, sigma=sigma0,
                                        e=e_t, s=s_t))
        out = sv.residual_thermodynamics(states, geos, cs)
        fe = float(np.max(np.abs(out.free_energy.values)))
        rows.append(ReportRow("thermo-free-energy-transport", grid.h_max, dt,
                              fe, 0.0, fe, fe))
        pmin = float(np.min(out.entropy_production.values))
        rows.append(ReportRow("entropy-production-min", grid.h_max, dt,
                              pmin, 0.0, abs(min(pmin, 0.0)), abs(min(pmin, 0.0))))
        if pmin < production_floor:
            failures.append(f"entropy production {pmin:.2e} below {production_floor:.0e}")

    # pointwise sign audit across every dissipative catalog set
    grid = Grid(cap.domain, min(resolutions))
    geos = [SurfaceGeometry(cap.spec, grid, tk) for tk in (0.28, 0.3, 0.32)]
    z0 = geos[1].x[2]
    for name in ("newtonian", "nonlinear-smooth", "shear-thickening"):
        cs_k = make_constitutive(name)
        if not cs_k.dissipative():
            continue
        states = [sv.FluidState(rho=1.0 + 0.1 * g.x[2], v=g.v,
                                theta=1.5 + 0.2 * g.x[0], C=1.0 + 0.0 * g.x[0],
                                sigma=1.0 + 0.0 * g.x[0], e=1.0 + 0.0 * g.x[0],
                                s=0.5 + 0.0 * g.x[0]) for g in geos]
        out = sv.residual_thermodynamics(states, geos, cs_k)
        pmin = float(np.min(out.entropy_production.values))
        rows.append(ReportRow(f"production-{name}", grid.h_max, np.nan,
                              pmin, 0.0, abs(min(pmin, 0.0)), abs(min(pmin, 0.0))))
        if pmin < production_floor:
            failures.append(
                f"entropy production for {name} is {pmin:.2e}")
    _span_orders(rows, failures, min_order,
                 skip=("thermo-free-energy-exact", "entropy-production-min",
                       "production-newtonian", "production-nonlinear-smooth",
                       "production-shear-thickening"))
    return attach_orders(rows), failures
