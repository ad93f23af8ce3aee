"""surfcalc: calculus and flow on parametrized evolving surfaces with boundary.

The package evaluates induced-metric geometry on structured parameter grids,
provides the tangential differential operators built on it, verifies the
integral and variational identities of that calculus as discretization-order
residuals, and integrates the tangential barotropic flow and surface
diffusion equations while auditing conservation and energy laws.
"""

from ._kernels import backend_name
from .constitutive import ConstitutiveSet, make_constitutive
from .domain import Grid, ParamDomain, annulus_sector, disk_polar, unit_square
from .errors import (
    CFLViolation,
    ConfigError,
    CornerNode,
    DegenerateSegment,
    InsufficientTimeLevels,
    NonpositiveDensity,
    NonpositiveThermo,
    SingularMetric,
    StepTooSmall,
    SurfcalcError,
)
from .fields import AmbientField, GridField, make_field
from .flowmap import FlowMapSpec, Surface, make_surface, strip_derivatives
from .geometry import (
    DiffConfig,
    MetricState,
    SurfaceGeometry,
    eval_conormal,
    eval_metric,
    eval_velocity,
)
from .quadrature import QuadratureRule, boundary_integral, conormal_flux, surface_integral

__version__ = "0.1.0"

__all__ = [
    "AmbientField",
    "CFLViolation",
    "ConfigError",
    "ConstitutiveSet",
    "CornerNode",
    "DegenerateSegment",
    "DiffConfig",
    "FlowMapSpec",
    "Grid",
    "GridField",
    "InsufficientTimeLevels",
    "MetricState",
    "NonpositiveDensity",
    "NonpositiveThermo",
    "ParamDomain",
    "QuadratureRule",
    "SingularMetric",
    "StepTooSmall",
    "Surface",
    "SurfaceGeometry",
    "SurfcalcError",
    "annulus_sector",
    "backend_name",
    "boundary_integral",
    "conormal_flux",
    "disk_polar",
    "eval_conormal",
    "eval_metric",
    "eval_velocity",
    "make_constitutive",
    "make_field",
    "make_surface",
    "strip_derivatives",
    "surface_integral",
    "unit_square",
    "__version__",
]
