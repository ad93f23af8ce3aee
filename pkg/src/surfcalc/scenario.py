"""Scenario configuration: JSON schema, validation, and suite dispatch.

A scenario names a surface and constitutive set from the catalogs, a strictly
increasing resolution ladder (at least three entries, so convergence orders
can be estimated), global discretization options, and a map of suite names to
per-suite option objects.  Running a scenario executes the selected suites,
writes one CSV per suite plus an order summary, and fails (nonzero status)
when any declared tolerance or order bound is missed.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from . import suites
from .constitutive import CONSTITUTIVE_CATALOG, make_constitutive
from .errors import ConfigError
from .flowmap import CATALOG as SURFACE_CATALOG
from .flowmap import make_surface
from .geometry import DiffConfig
from .quadrature import QuadratureRule
from .report import ReportRow, span_order, write_csv

SUITE_NAMES = (
    "geometry",
    "identities",
    "hemisphere-divergence",
    "variational",
    "action",
    "barotropic",
    "diffusion",
    "conservation",
    "system",
    "thermo",
)


@dataclass
class Scenario:
    name: str
    surface_name: str
    surface_params: dict
    constitutive_name: str
    constitutive_params: dict
    resolutions: list
    suites: dict
    seed: int = 12345
    t: float = 0.5
    stencil_order: int = 2
    quadrature: str = "trapezoid"
    output: str = "out"

    @property
    def diff(self):
        return DiffConfig(order=self.stencil_order)

    @property
    def rule(self):
        return QuadratureRule(self.quadrature)

    def surface(self):
        return make_surface(self.surface_name, self.surface_params)

    def constitutive(self):
        return make_constitutive(self.constitutive_name, self.constitutive_params)


def _need(cfg, field, types, where=""):
    path = f"{where}.{field}" if where else field
    if field not in cfg:
        raise ConfigError(path, "missing required field")
    val = cfg[field]
    if not isinstance(val, types):
        tnames = types.__name__ if isinstance(types, type) else \
            "/".join(t.__name__ for t in types)
        raise ConfigError(path, f"expected {tnames}, got {type(val).__name__}")
    return val


def load_scenario(path: str) -> Scenario:
    """Parse and validate a scenario file; raises ConfigError with the field."""
    try:
        with open(path) as f:
            cfg = json.load(f)
    except FileNotFoundError:
        raise ConfigError("scenario", f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError("scenario", f"invalid JSON at line {exc.lineno}: {exc.msg}")
    if not isinstance(cfg, dict):
        raise ConfigError("scenario", "top level must be an object")

    name = _need(cfg, "name", str)
    surf = _need(cfg, "surface", dict)
    surf_name = _need(surf, "name", str, "surface")
    if surf_name not in SURFACE_CATALOG:
        raise ConfigError("surface.name",
                          f"unknown surface {surf_name!r}; "
                          f"available: {sorted(SURFACE_CATALOG)}")
    surf_params = surf.get("params", {})
    if not isinstance(surf_params, dict):
        raise ConfigError("surface.params", "expected object")
    try:
        make_surface(surf_name, surf_params)
    except TypeError as exc:
        raise ConfigError("surface.params", str(exc))
    except ValueError as exc:
        raise ConfigError("surface.params", str(exc))

    cons = cfg.get("constitutive", {"name": "newtonian"})
    if not isinstance(cons, dict):
        raise ConfigError("constitutive", "expected object")
    cons_name = _need(cons, "name", str, "constitutive")
    if cons_name not in CONSTITUTIVE_CATALOG:
        raise ConfigError("constitutive.name",
                          f"unknown constitutive set {cons_name!r}; "
                          f"available: {sorted(CONSTITUTIVE_CATALOG)}")
    cons_params = cons.get("params", {})

    res = _need(cfg, "resolutions", list)
    if len(res) < 3:
        raise ConfigError("resolutions", "need at least 3 for order estimation")
    if any(not isinstance(r, int) or r < 4 for r in res):
        raise ConfigError("resolutions", "entries must be integers >= 4")
    if any(b <= a for a, b in zip(res, res[1:])):
        raise ConfigError("resolutions", "must be strictly increasing")

    suites_cfg = _need(cfg, "suites", dict)
    for key, val in suites_cfg.items():
        if key not in SUITE_NAMES:
            raise ConfigError(f"suites.{key}",
                              f"unknown suite; available: {list(SUITE_NAMES)}")
        if not isinstance(val, dict):
            raise ConfigError(f"suites.{key}", "options must be an object")

    order = cfg.get("stencil_order", 2)
    if order not in (2, 4):
        raise ConfigError("stencil_order", "must be 2 or 4")
    quad = cfg.get("quadrature", "trapezoid")
    if quad not in ("trapezoid", "simpson"):
        raise ConfigError("quadrature", "must be 'trapezoid' or 'simpson'")
    if quad == "simpson" and any(r % 2 for r in res):
        raise ConfigError("resolutions",
                          "Simpson quadrature needs even cell counts")
    seed = cfg.get("seed", 12345)
    if not isinstance(seed, int):
        raise ConfigError("seed", "must be an integer")
    t = cfg.get("t", 0.5)
    if not isinstance(t, (int, float)):
        raise ConfigError("t", "must be a number")

    return Scenario(
        name=name,
        surface_name=surf_name,
        surface_params=surf_params,
        constitutive_name=cons_name,
        constitutive_params=cons_params,
        resolutions=list(res),
        suites={k: dict(v) for k, v in suites_cfg.items()},
        seed=seed,
        t=float(t),
        stencil_order=order,
        quadrature=quad,
        output=cfg.get("output", "out"),
    )


def _run_one_suite(scn: Scenario, key: str, opts: dict, out_dir: str):
    surface = scn.surface()
    cs = scn.constitutive()
    res = opts.pop("resolutions", scn.resolutions)
    if key == "barotropic":
        opts.setdefault("balance_dir", out_dir)
    if key == "system":
        opts.setdefault("summary_dir", out_dir)
    if key == "geometry":
        return suites.geometry_suite(surface, res, t=0.0, **opts)
    if key == "identities":
        return suites.identities_suite(surface, cs, res, t=scn.t,
                                       rule=scn.rule, diff=scn.diff,
                                       seed=scn.seed, **opts)
    if key == "hemisphere-divergence":
        return suites.hemisphere_divergence_suite(res, seed=scn.seed + 1, **opts)
    if key == "variational":
        return suites.variational_suite(surface, cs, res, t=scn.t,
                                        seed=scn.seed + 2, rule=scn.rule, **opts)
    if key == "action":
        return suites.action_suite(surface, cs, rule=scn.rule, **opts)
    if key == "barotropic":
        return suites.barotropic_suite(res, **opts)
    if key == "diffusion":
        return suites.diffusion_suite(res, **opts)
    if key == "conservation":
        return suites.conservation_suite(res, seed=scn.seed + 3,
                                         rule=scn.rule, **opts)
    if key == "system":
        return suites.system_residual_suite(res, rule=scn.rule, **opts)
    if key == "thermo":
        return suites.thermo_suite(res, rule=scn.rule, **opts)
    raise ConfigError(f"suites.{key}", "unknown suite")


@dataclass
class SuiteOutcome:
    suite: str
    rows: list
    failures: list
    csv_path: Optional[str] = None


def run_scenario(scn: Scenario, out_dir: Optional[str] = None,
                 threads: int = 1) -> list:
    """Execute the selected suites; returns SuiteOutcome per suite in order."""
    out_dir = out_dir or scn.output
    ordered = [(k, dict(v)) for k, v in scn.suites.items()]
    results = {}
    if threads > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = {k: pool.submit(_run_one_suite, scn, k, opts, out_dir)
                    for k, opts in ordered}
            for k, fut in futs.items():
                results[k] = fut.result()
    else:
        for k, opts in ordered:
            results[k] = _run_one_suite(scn, k, opts, out_dir)

    outcomes = []
    summary_rows = []
    for k, _ in ordered:
        rows, failures = results[k]
        path = os.path.join(out_dir, f"{scn.name}_{k}.csv")
        write_csv(path, rows)
        outcomes.append(SuiteOutcome(k, rows, failures, path))
        by_name = {}
        for row in rows:
            by_name.setdefault(row.name, []).append(row)
        for cname, crows in by_name.items():
            residuals = [r.abs_residual for r in crows]
            summary_rows.append(ReportRow(
                f"{k}/{cname}", crows[-1].h, crows[-1].dt,
                residuals[0], residuals[-1], residuals[-1],
                crows[-1].rel_residual, span_order(residuals)))
    write_csv(os.path.join(out_dir, f"{scn.name}_orders.csv"), summary_rows)
    return outcomes
