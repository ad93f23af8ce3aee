"""Grid fields and the closed-form ambient field catalog.

GridField is a thin container: sampled values (scalar (n1,n2), vector
(3,n1,n2) or tensor (3,3,n1,n2)), a rank tag and an informational units tag.
AmbientField entries define fields as functions of ambient position and time
with optional closed-form gradients, used to sample scenario data on any
catalog surface.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

RANK_SHAPES = {"scalar": 0, "vector": 1, "tensor": 2}


@dataclass
class GridField:
    """Sampled field on the parameter grid at one time."""

    values: np.ndarray
    rank: str = "scalar"
    units: str = ""
    tangent: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        lead = RANK_SHAPES[self.rank]
        if self.values.ndim != lead + 2:
            raise ValueError(
                f"{self.rank} field needs {lead + 2} array dims, got {self.values.ndim}"
            )

    @property
    def grid_shape(self):
        return self.values.shape[-2:]

    def tangency_defect(self, geo):
        """max |n . field| (vector) or |field n| (tensor); 0 for scalars."""
        if self.rank == "scalar":
            return 0.0
        if self.rank == "vector":
            return float(np.max(np.abs(np.einsum("i...,i...->...", geo.n, self.values))))
        return float(np.max(np.abs(np.einsum("ij...,j...->i...", self.values, geo.n))))


def as_values(f):
    return f.values if isinstance(f, GridField) else np.asarray(f, dtype=np.float64)


@dataclass(frozen=True)
class AmbientField:
    """Closed-form scalar field of ambient position and time."""

    name: str
    value: Callable  # (x, y, z, t) -> array
    grad: Optional[Callable] = None  # (x, y, z, t) -> (3, ...) array
    dt: Optional[Callable] = None

    def sample(self, geo) -> GridField:
        x, y, z = geo.x
        return GridField(self.value(x, y, z, geo.t), "scalar")

    def sample_grad(self, geo) -> np.ndarray:
        if self.grad is None:
            raise ValueError(f"field {self.name!r} has no closed-form gradient")
        x, y, z = geo.x
        return np.asarray(self.grad(x, y, z, geo.t))

    def chart_partials(self, geo):
        """Analytic parameter derivatives (d f/dX1, d f/dX2) via the chain rule."""
        gr = self.sample_grad(geo)
        d1 = np.einsum("i...,i...->...", gr, geo.g1)
        d2 = np.einsum("i...,i...->...", gr, geo.g2)
        return d1, d2


def _zeros3(x):
    return np.stack([np.zeros_like(x)] * 3)


_J1_COEFFS = [(-1.0) ** m / (math.factorial(m) * math.factorial(m + 1))
              for m in range(20)]


def bessel_j1_over_r(k, r2):
    """J1(k r)/r evaluated by power series; accurate for k*r up to ~6.

    Series in r^2, smooth through r = 0, used for disk eigenmode initial data.
    """
    k = float(k)
    u = (0.25 * k * k) * np.asarray(r2, dtype=np.float64)
    acc = np.zeros_like(u)
    for c in reversed(_J1_COEFFS):
        acc = acc * u + c
    return 0.5 * k * acc


def make_catalog():
    """Named closed-form field constructors for scenario configs."""

    def const(value=1.0):
        return AmbientField(
            "const",
            lambda x, y, z, t: np.full_like(x, float(value)),
            grad=lambda x, y, z, t: _zeros3(x),
            dt=lambda x, y, z, t: np.zeros_like(x),
        )

    def coord(axis=2):
        axis = int(axis)

        def val(x, y, z, t):
            return (x, y, z)[axis] + 0.0

        def grad(x, y, z, t):
            g = _zeros3(x)
            g[axis] = 1.0
            return g

        return AmbientField(f"coord{axis}", val, grad=grad,
                            dt=lambda x, y, z, t: np.zeros_like(x))

    def linear(a=0.0, b=0.0, c=1.0, offset=0.0):
        a, b, c, d = map(float, (a, b, c, offset))

        def val(x, y, z, t):
            return d + a * x + b * y + c * z

        def grad(x, y, z, t):
            return np.stack([np.full_like(x, a), np.full_like(y, b),
                             np.full_like(z, c)])

        return AmbientField("linear", val, grad=grad,
                            dt=lambda x, y, z, t: np.zeros_like(x))

    def planar_r2():
        return AmbientField(
            "planar-r2",
            lambda x, y, z, t: x * x + y * y,
            grad=lambda x, y, z, t: np.stack([2 * x, 2 * y, np.zeros_like(z)]),
            dt=lambda x, y, z, t: np.zeros_like(x),
        )

    def abs2():
        return AmbientField(
            "abs2",
            lambda x, y, z, t: x * x + y * y + z * z,
            grad=lambda x, y, z, t: np.stack([2 * x, 2 * y, 2 * z]),
            dt=lambda x, y, z, t: np.zeros_like(x),
        )

    def trig(kx=1.0, ky=1.0, kz=0.0, amplitude=1.0, offset=0.0):
        kx, ky, kz, A, c0 = map(float, (kx, ky, kz, amplitude, offset))

        def val(x, y, z, t):
            return c0 + A * np.sin(kx * x) * np.sin(ky * y + 0.5) * np.cos(kz * z)

        def grad(x, y, z, t):
            sx, cx = np.sin(kx * x), np.cos(kx * x)
            sy, cy = np.sin(ky * y + 0.5), np.cos(ky * y + 0.5)
            sz, cz = np.sin(kz * z), np.cos(kz * z)
            return np.stack([A * kx * cx * sy * cz,
                             A * ky * sx * cy * cz,
                             -A * kz * sx * sy * sz])

        return AmbientField("trig", val, grad=grad,
                            dt=lambda x, y, z, t: np.zeros_like(x))

    def gauss(cx=0.0, cy=0.0, cz=0.0, width=0.5, amplitude=1.0, offset=0.0):
        cx, cy, cz, s, A, c0 = map(float, (cx, cy, cz, width, amplitude, offset))

        def val(x, y, z, t):
            q = ((x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2) / s**2
            return c0 + A * np.exp(-q)

        def grad(x, y, z, t):
            q = ((x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2) / s**2
            e = A * np.exp(-q) * (-2.0 / s**2)
            return np.stack([e * (x - cx), e * (y - cy), e * (z - cz)])

        return AmbientField("gauss", val, grad=grad,
                            dt=lambda x, y, z, t: np.zeros_like(x))

    def radial_gauss(center=0.6, width=0.15, amplitude=1e-3, offset=1.0):
        """Offset plus a ring-shaped bump in the planar radius."""
        c, s, A, c0 = map(float, (center, width, amplitude, offset))

        def val(x, y, z, t):
            r = np.sqrt(x * x + y * y)
            return c0 + A * np.exp(-((r - c) / s) ** 2)

        def grad(x, y, z, t):
            r = np.sqrt(x * x + y * y)
            e = A * np.exp(-((r - c) / s) ** 2) * (-2.0 * (r - c) / s**2)
            rs = np.where(r > 0, r, 1.0)
            return np.stack([e * x / rs, e * y / rs, np.zeros_like(z)])

        return AmbientField("radial-gauss", val, grad=grad,
                            dt=lambda x, y, z, t: np.zeros_like(x))

    def disk_mode(k=1.8411837813406593, amplitude=1.0, offset=0.0):
        """First angular Neumann eigenmode of the unit disk, J1(k r) cos(phi)."""
        k, A, c0 = map(float, (k, amplitude, offset))

        def val(x, y, z, t):
            return c0 + A * x * bessel_j1_over_r(k, x * x + y * y)

        return AmbientField("disk-mode", val)

    return {
        "const": const,
        "coord-x": lambda **kw: coord(0),
        "coord-y": lambda **kw: coord(1),
        "coord-z": lambda **kw: coord(2),
        "linear": linear,
        "planar-r2": planar_r2,
        "abs2": abs2,
        "trig": trig,
        "gauss": gauss,
        "radial-gauss": radial_gauss,
        "disk-mode": disk_mode,
    }


FIELD_CATALOG = make_catalog()


def make_field(name: str, params: Optional[dict] = None) -> AmbientField:
    if name not in FIELD_CATALOG:
        raise KeyError(f"unknown field {name!r}; available: {sorted(FIELD_CATALOG)}")
    return FIELD_CATALOG[name](**(params or {}))
