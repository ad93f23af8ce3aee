"""Constitutive function sets: dissipation densities e1..e4 and pressure p.

Each e_j maps a nonnegative scalar invariant to an energy density and must be
C^1; the stress, heat-flux and diffusive-flux laws use the derivatives.  The
set also carries the barotropic pressure p(rho); the effective pressure in
the momentum balance is rho p'(rho) - p(rho).
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class ScalarLaw:
    """A C^1 scalar function with its derivative."""

    f: Callable
    df: Callable

    def __call__(self, r):
        return self.f(np.asarray(r, dtype=np.float64))

    def d(self, r):
        return self.df(np.asarray(r, dtype=np.float64))


def linear_law(mu=1.0):
    mu = float(mu)
    return ScalarLaw(lambda r: mu * r, lambda r: np.full_like(r, mu))


def quadratic_law(a=1.0, b=1.0):
    """e(r) = a r + b r^2; strictly dissipative for a, b >= 0."""
    a, b = float(a), float(b)
    return ScalarLaw(lambda r: a * r + b * r * r, lambda r: a + 2.0 * b * r)


def power_law(mu=1.0, q=4.0):
    """e(r) = (2 mu / q) r^(q/2), so e'(|D|^2) = mu |D|^(q-2); needs q >= 2."""
    mu, q = float(mu), float(q)
    if q < 2.0:
        raise ValueError("power-law exponent must be at least 2 for a C^1 law")
    return ScalarLaw(lambda r: (2.0 * mu / q) * r ** (q / 2.0),
                     lambda r: mu * r ** (q / 2.0 - 1.0))


def pressure_quadratic(scale=1.0):
    """p(rho) = scale rho^2; effective pressure equals scale rho^2 as well."""
    s = float(scale)
    return ScalarLaw(lambda r: s * r * r, lambda r: 2.0 * s * r)


def pressure_gamma(kappa=1.0, gamma=1.4):
    k, g = float(kappa), float(gamma)
    return ScalarLaw(lambda r: k * r**g, lambda r: k * g * r ** (g - 1.0))


@dataclass(frozen=True)
class ConstitutiveSet:
    """Energy densities e1..e4 with derivatives, plus the pressure law."""

    name: str
    e1: ScalarLaw
    e2: ScalarLaw
    e3: ScalarLaw
    e4: ScalarLaw
    p: ScalarLaw

    def effective_pressure(self, rho):
        """rho p'(rho) - p(rho)."""
        rho = np.asarray(rho, dtype=np.float64)
        return rho * self.p.d(rho) - self.p(rho)

    def effective_pressure_rate(self, rho):
        """d/drho of the effective pressure, rho p''(rho); used for wave speeds."""
        rho = np.asarray(rho, dtype=np.float64)
        d = 1e-6 * max(1.0, float(np.max(np.abs(rho))))
        return (self.effective_pressure(rho + d) - self.effective_pressure(rho - d)) / (2 * d)

    def dissipative(self, sample_args=None) -> bool:
        """True when every e_j' is nonnegative on the sampled argument range."""
        args = np.linspace(0.0, 10.0, 101) if sample_args is None else np.asarray(sample_args)
        return all(bool(np.all(law.d(args) >= 0.0))
                   for law in (self.e1, self.e2, self.e3, self.e4))

    def derivative_defect(self, sample_args=None, delta=1e-5) -> float:
        """max |central difference of e_j - e_j'| over sampled arguments."""
        args = np.linspace(0.1, 5.0, 25) if sample_args is None else np.asarray(sample_args)
        worst = 0.0
        for law in (self.e1, self.e2, self.e3, self.e4):
            fd = (law(args + delta) - law(args - delta)) / (2 * delta)
            worst = max(worst, float(np.max(np.abs(fd - law.d(args)))))
        return worst


def newtonian(mu1=1.0, mu2=1.0, mu3=1.0, mu4=1.0, pressure: Optional[ScalarLaw] = None):
    """Linear laws: stress reduces to the classical two-viscosity surface form."""
    return ConstitutiveSet(
        "newtonian",
        linear_law(mu1), linear_law(mu2), linear_law(mu3), linear_law(mu4),
        pressure or pressure_quadratic(),
    )


def nonlinear_smooth(a=1.0, b=0.5, pressure: Optional[ScalarLaw] = None):
    """Quadratic laws e(r) = a r + b r^2; exercises the generalized stress."""
    law = quadratic_law(a, b)
    return ConstitutiveSet("nonlinear-smooth", law, law, law, law,
                           pressure or pressure_quadratic())


def shear_thickening(mu=1.0, q=4.0, pressure: Optional[ScalarLaw] = None):
    """Power-law viscous response with linear heat and species diffusion."""
    return ConstitutiveSet(
        "shear-thickening",
        power_law(mu, q), linear_law(mu), linear_law(1.0), linear_law(1.0),
        pressure or pressure_quadratic(),
    )


CONSTITUTIVE_CATALOG = {
    "newtonian": newtonian,
    "nonlinear-smooth": nonlinear_smooth,
    "shear-thickening": shear_thickening,
}


def make_constitutive(name: str, params: Optional[dict] = None) -> ConstitutiveSet:
    if name not in CONSTITUTIVE_CATALOG:
        raise KeyError(
            f"unknown constitutive set {name!r}; available: {sorted(CONSTITUTIVE_CATALOG)}"
        )
    params = dict(params or {})
    if "pressure" in params:
        pspec = params.pop("pressure")
        if pspec.get("name") == "quadratic":
            params["pressure"] = pressure_quadratic(**pspec.get("params", {}))
        elif pspec.get("name") == "gamma":
            params["pressure"] = pressure_gamma(**pspec.get("params", {}))
        else:
            raise KeyError(f"unknown pressure law {pspec.get('name')!r}")
    return CONSTITUTIVE_CATALOG[name](**params)
