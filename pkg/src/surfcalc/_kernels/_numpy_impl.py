"""Pure-numpy stencil and reduction kernels.

Reference implementation for the compiled extension: both backends evaluate
the same expressions in the same order, so results agree to the last ulp for
the reductions and to rounding for the stencils.
"""

import numpy as np

BACKEND = "numpy"

_C2_ONESIDED = (-3.0, 4.0, -1.0)
_C4_EDGE = (-25.0, 48.0, -36.0, 16.0, -3.0)
_C4_NEXT = (-3.0, -10.0, 18.0, -6.0, 1.0)


def _diff1_axis0(f, h, order, periodic, sbp):
    n = f.shape[0]
    out = np.empty_like(f)
    if order == 2:
        c = 0.5 / h
        if periodic:
            out[:] = (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) * c
            return out
        out[1:-1] = (f[2:] - f[:-2]) * c
        if sbp:
            out[0] = (f[1] - f[0]) * (1.0 / h)
            out[-1] = (f[-1] - f[-2]) * (1.0 / h)
        else:
            a0, a1, a2 = _C2_ONESIDED
            out[0] = (a0 * f[0] + a1 * f[1] + a2 * f[2]) * c
            out[-1] = (-a0 * f[-1] - a1 * f[-2] - a2 * f[-3]) * c
        return out
    # order 4
    c = 1.0 / (12.0 * h)
    if periodic:
        out[:] = (
            np.roll(f, 2, axis=0)
            - 8.0 * np.roll(f, 1, axis=0)
            + 8.0 * np.roll(f, -1, axis=0)
            - np.roll(f, -2, axis=0)
        ) * c
        return out
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) * c
    e = _C4_EDGE
    q = _C4_NEXT
    out[0] = (e[0] * f[0] + e[1] * f[1] + e[2] * f[2] + e[3] * f[3] + e[4] * f[4]) * c
    out[1] = (q[0] * f[0] + q[1] * f[1] + q[2] * f[2] + q[3] * f[3] + q[4] * f[4]) * c
    out[-1] = -(
        e[0] * f[-1] + e[1] * f[-2] + e[2] * f[-3] + e[3] * f[-4] + e[4] * f[-5]
    ) * c
    out[-2] = -(
        q[0] * f[-1] + q[1] * f[-2] + q[2] * f[-3] + q[3] * f[-4] + q[4] * f[-5]
    ) * c
    return out


def diff1(f, axis, h, order=2, periodic=False, sbp=False):
    """First derivative of a 2d array along one grid axis.

    Interior nodes use central differences of the given order (2 or 4);
    non-periodic edges use one-sided stencils of matching order.  With
    ``sbp=True`` (order 2 only) the edge rows use the first-order closure
    whose trapezoid-weighted column sums telescope exactly, which is what
    the conservative flux updates rely on.
    """
    f = np.ascontiguousarray(f, dtype=np.float64)
    if order not in (2, 4):
        raise ValueError(f"stencil order must be 2 or 4, got {order}")
    if sbp and order != 2:
        raise ValueError("sbp closure is defined for order 2 only")
    n = f.shape[axis]
    if n < (5 if order == 4 else 3):
        raise ValueError(f"axis {axis} too short ({n}) for order-{order} stencil")
    if axis == 0:
        return _diff1_axis0(f, h, order, periodic, sbp)
    return _diff1_axis0(f.T, h, order, periodic, sbp).T.copy()


def compact_flux_div(a, c, axis, h, periodic=False):
    """Conservative second-derivative kernel ``d/dx(a * dc/dx)`` on nodes.

    Face fluxes use arithmetic-mean coefficients.  Non-periodic edges reflect
    both the field and the coefficient across the boundary node, which makes
    the trapezoid-weighted total of the output exactly zero (discrete
    zero-flux boundary).
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    if axis == 1:
        return compact_flux_div(a.T, c.T, 0, h, periodic).T.copy()
    inv_h2 = 1.0 / (h * h)
    if periodic:
        a_up = np.roll(a, -1, axis=0)
        c_up = np.roll(c, -1, axis=0)
        flux = 0.5 * (a + a_up) * (c_up - c)  # F_{i+1/2} * h
        return (flux - np.roll(flux, 1, axis=0)) * inv_h2
    flux = 0.5 * (a[1:] + a[:-1]) * (c[1:] - c[:-1])
    out = np.empty_like(c)
    out[1:-1] = (flux[1:] - flux[:-1]) * inv_h2
    # reflected ghost face carries the negated first interior flux
    out[0] = 2.0 * flux[0] * inv_h2
    out[-1] = -2.0 * flux[-1] * inv_h2
    return out


def pairwise_sum(a):
    """Deterministic pairwise reduction of a 1d array.

    The reduction tree is the fixed power-of-two halving tree (missing
    partners act as zeros), identical in both backends, so repeated runs and
    backend swaps produce bit-identical totals.
    """
    buf = np.array(a, dtype=np.float64).ravel().copy()
    n = buf.shape[0]
    if n == 0:
        return 0.0
    m = 1
    while m < n:
        step = 2 * m
        buf[0 : n - m : step] += buf[m:n:step]
        m = step
    return float(buf[0])
