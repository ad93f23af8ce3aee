"""Acceptance gate: every release criterion at its declared tolerance.

Each test prints one PASS line when its criterion holds; run with
``pytest tests/test_acceptance.py -v -s`` to see the full report.  The
tolerances here are the contract: do not loosen them to make a failing
configuration pass.
"""

import os
import time

from surfcalc import Grid, SurfaceGeometry, make_constitutive, make_surface
from surfcalc import suites
from surfcalc.report import span_order

RESOLUTIONS = (32, 64, 128)


def _by_name(rows):
    out = {}
    for row in rows:
        out.setdefault(row.name, []).append(row)
    return out


def _report(num, label, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num} [{status}] {label}: {detail}")
    assert ok, f"criterion {num} ({label}): {detail}"


def test_criterion_1_curvature_convergence():
    t0 = time.perf_counter()
    surf = make_surface("sphere-cap", {"theta_min": 0.2, "theta_max": 1.4})
    rows, failures = suites.geometry_suite(surf, RESOLUTIONS,
                                           curvature_reference=-2.0)
    elapsed = time.perf_counter() - t0
    errs = [r.abs_residual for r in _by_name(rows)["curvature-error"]]
    order = span_order(errs)
    ok = not failures and order >= 1.9 and elapsed < 10.0
    _report(1, "curvature order on the unit cap", ok,
            f"errors {['%.2e' % e for e in errs]}, order {order:.2f}, "
            f"{elapsed:.1f}s")


def test_criterion_2_energy_identities():
    surf = make_surface("expanding-sphere-cap", {"rate": 1.0})
    cs = make_constitutive("nonlinear-smooth")
    rows, failures = suites.identities_suite(surf, cs, RESOLUTIONS, t=0.5,
                                             tol_rel=1e-3, min_order=1.9)
    names = ("total-dilation-rate", "pressure-work-rate", "shear-energy",
             "dilation-energy", "thermal-gradient-energy",
             "species-gradient-energy")
    by = _by_name(rows)
    finest = {n: by[n][-1].rel_residual for n in names}
    orders = {n: span_order([r.abs_residual for r in by[n]]) for n in names}
    ok = (not failures and all(v <= 1e-3 for v in finest.values())
          and all(o >= 1.9 for o in orders.values()))
    _report(2, "six energy-density identities", ok,
            f"finest rel {max(finest.values()):.2e}, "
            f"min order {min(orders.values()):.2f}")


def test_criterion_3_divergence_theorem():
    rows, failures = suites.hemisphere_divergence_suite(
        RESOLUTIONS, tol_const=1e-6, min_order=1.9)
    by = _by_name(rows)
    const_rel = by["divergence-constant"][-1].rel_residual
    order = span_order([r.abs_residual for r in by["divergence-smooth"]])
    ok = not failures and const_rel <= 1e-6 and order >= 1.9
    _report(3, "divergence theorem on the hemisphere", ok,
            f"constant-field rel {const_rel:.2e}, smooth order {order:.2f}")


def test_criterion_4_force_pairings():
    surf = make_surface("expanding-sphere-cap", {"rate": 1.0})
    cs = make_constitutive("nonlinear-smooth")
    rows, failures = suites.variational_suite(surf, cs, RESOLUTIONS, t=0.5,
                                              n_directions=5, tol_rel=1e-3,
                                              min_order=1.9)
    by = _by_name(rows)
    worst = 0.0
    for name, group in by.items():
        row = group[-1]
        worst = max(worst, row.abs_residual / max(abs(row.lhs), abs(row.rhs), 1.0))
    n_checks = len(by)
    ok = not failures and worst <= 1e-3
    _report(4, "variational force pairings", ok,
            f"{n_checks} direction/variant checks, worst scaled residual "
            f"{worst:.2e}")


def test_criterion_5_action_variation_and_mass():
    surf = make_surface("expanding-sphere-cap", {"rate": 0.6, "accel": 0.5})
    cs = make_constitutive("newtonian")  # pressure rho^2
    rows, failures = suites.action_suite(surf, cs, min_order=1.9,
                                         mass_tol_moving=1e-6)
    by = _by_name(rows)
    o_act = span_order([r.abs_residual for r in by["action-variation-inertia"]])
    o_bar = span_order([r.abs_residual for r in by["action-variation-barotropic"]])

    from surfcalc.quadrature import surface_integral
    from surfcalc.variational import density_transport

    # stationary surface: transported density is constant, trivially conserved
    flat = make_surface("flat-disk")
    grid = Grid(flat.domain, 128)
    geos = [SurfaceGeometry(flat.spec, grid, t) for t in (0.0, 0.5, 1.0)]
    rho0 = 1.0 + 0.3 * geos[0].x[0]
    masses = [surface_integral(r, g)
              for r, g in zip(density_transport(rho0, geos), geos)]
    drift_flat = max(abs(m - masses[0]) for m in masses) / abs(masses[0])

    # expanding cap at the finest resolution
    gridc = Grid(surf.domain, 128)
    geosc = [SurfaceGeometry(surf.spec, gridc, t) for t in (0.0, 0.25, 0.5)]
    rho0c = 1.0 + 0.2 * geosc[0].x[2]
    massesc = [surface_integral(r, g)
               for r, g in zip(density_transport(rho0c, geosc), geosc)]
    drift_moving = max(abs(m - massesc[0]) for m in massesc) / abs(massesc[0])

    ok = (not failures and o_act >= 1.9 and o_bar >= 1.9
          and drift_flat <= 1e-8 and drift_moving <= 1e-6)
    _report(5, "action variation and transported mass", ok,
            f"orders (inertia {o_act:.2f}, pressure {o_bar:.2f}), mass drift "
            f"stationary {drift_flat:.1e}, moving {drift_moving:.1e}")


def test_criterion_6_solver():
    rows_b, fail_b = suites.barotropic_suite(RESOLUTIONS, t_final=1.0, cfl=0.4,
                                             mass_tol=1e-6, min_order=1.9)
    by_b = _by_name(rows_b)
    drift = by_b["mass-drift"][-1].abs_residual
    e_order = span_order([r.abs_residual for r in by_b["energy-law-residual"]])

    rows_d, fail_d = suites.diffusion_suite(RESOLUTIONS, rate_tol=0.01,
                                            conserve_tol=1e-8)
    by_d = _by_name(rows_d)
    rate_err = by_d["diffusion-decay-rate"][-1].rel_residual
    ok = (not fail_b and not fail_d and drift <= 1e-6 and e_order >= 1.9
          and rate_err <= 0.01)
    _report(6, "barotropic run and diffusion decay", ok,
            f"mass drift {drift:.1e}, energy-law order {e_order:.2f}, "
            f"decay-rate error {rate_err:.2%}")


def test_criterion_7_conservation_audit():
    rows, failures = suites.conservation_suite(RESOLUTIONS, torque_tol=1e-3,
                                               min_order=1.9)
    by = _by_name(rows)
    o_p = span_order([r.abs_residual for r in by["momentum-balance"]])
    o_L = span_order([r.abs_residual for r in by["angular-balance"]])
    torque = by["stress-torque"][-1].abs_residual
    ok = not failures and o_p >= 1.9 and o_L >= 1.9 and torque <= 1e-3
    _report(7, "momentum and angular-momentum audit", ok,
            f"orders ({o_p:.2f}, {o_L:.2f}), torque {torque:.2e}")


def test_criterion_8_thermodynamics():
    rows, failures = suites.thermo_suite(RESOLUTIONS, min_order=1.9,
                                         production_floor=-1e-12)
    by = _by_name(rows)
    orders = [span_order([r.abs_residual for r in by[n]])
              for n in ("thermo-enthalpy", "thermo-entropy",
                        "thermo-free-energy-transport")]
    pmins = [by[n][-1].lhs for n in by if n.startswith("production-")]
    ok = (not failures and min(orders) >= 1.9
          and all(p >= -1e-12 for p in pmins))
    _report(8, "thermodynamic balances and entropy sign", ok,
            f"min order {min(orders):.2f}, min production {min(pmins):.1e}")


def test_criterion_9_determinism(tmp_path):
    import json

    from surfcalc.scenario import load_scenario, run_scenario

    cfg = {
        "name": "det",
        "seed": 99,
        "surface": {"name": "expanding-sphere-cap", "params": {"rate": 1.0}},
        "constitutive": {"name": "nonlinear-smooth"},
        "resolutions": [8, 16, 32],
        "t": 0.5,
        "suites": {"identities": {}, "geometry": {"curvature_reference": -2.0}},
    }
    path = tmp_path / "det.json"
    path.write_text(json.dumps(cfg))
    scn = load_scenario(str(path))
    run_scenario(scn, str(tmp_path / "run1"))
    run_scenario(scn, str(tmp_path / "run2"))
    identical = True
    for fname in sorted(os.listdir(tmp_path / "run1")):
        a = (tmp_path / "run1" / fname).read_bytes()
        b = (tmp_path / "run2" / fname).read_bytes()
        identical = identical and a == b
    _report(9, "byte-identical scenario reruns", identical,
            f"{len(os.listdir(tmp_path / 'run1'))} report files compared")
